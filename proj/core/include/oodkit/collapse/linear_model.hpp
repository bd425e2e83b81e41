#pragma once

#include "oodkit/feature_set.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <vector>

namespace oodkit::collapse {

// Gradient descent on mean cross-entropy + weight_decay * ||W||_F^2 from a
// zero start. batch_size 0 means full batch.
struct TrainConfig {
    double learning_rate = 0.1;
    double weight_decay = 0.05;
    std::size_t max_epochs = 5000;
    std::size_t batch_size = 0;
    double tolerance = 1e-6; // stop when one epoch lowers the objective by less
    std::uint64_t seed = 0;

    void validate() const;
};

struct LinearModel {
    Eigen::MatrixXd weights; // C x D
    Eigen::VectorXd bias;    // C
    TrainConfig config;
    std::size_t epochs = 0;
    bool converged = false;
    double objective = 0.0;

    std::size_t classes() const noexcept { return static_cast<std::size_t>(weights.rows()); }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(weights.cols()); }

    Eigen::MatrixXd logits(const MatrixF& x) const;
    std::vector<std::int32_t> predict(const MatrixF& x) const;
    double accuracy(const MatrixF& x, std::span<const std::int32_t> labels) const;
};

// Labels must lie in [0, classes).
LinearModel train_linear(const MatrixF& x, std::span<const std::int32_t> labels, std::size_t classes,
                         const TrainConfig& config);

// Uses the set's labels; the class count is max label + 1.
LinearModel train_linear(const FeatureSet& train, const TrainConfig& config);

// ||W[:, :split]||_F / ||W[:, split:]||_F.
double block_norm_ratio(const LinearModel& model, std::size_t split);

// Supervised view of raw rows: features and logits are the model's logits,
// the raw rows become penultimate activations and the model the head.
FeatureSet supervised_view(const LinearModel& model, const FeatureSet& raw, bool keep_labels);

} // namespace oodkit::collapse
