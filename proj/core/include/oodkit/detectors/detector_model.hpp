#pragma once

#include "oodkit/detectors/knn_index.hpp"
#include "oodkit/feature_set.hpp"

#include <Eigen/Core>

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace oodkit {

enum class DetectorKind { msp, energy, mahalanobis, knn, react };

std::string_view to_string(DetectorKind kind);
DetectorKind parse_detector_kind(std::string_view name);

// Which block of a FeatureSet a detector reads.
enum class ScoreInput { logits, features, penultimate };

struct MspState {};

struct EnergyState {
    double temperature = 1.0;
};

struct MahalanobisState {
    std::vector<std::int32_t> classes;
    Eigen::MatrixXd means;     // one row per class
    Eigen::MatrixXd precision; // shared, D x D
    double shrinkage = 0.0;
};

struct KnnState {
    KnnIndex index;
    std::size_t k = 1;
};

struct ReactState {
    double clip = 0.0;
    double percentile = 90.0;
    Eigen::MatrixXd weights; // C x P
    Eigen::VectorXd bias;
};

// Fitted, immutable scoring method. Scores are higher for more
// in-distribution inputs.
class DetectorModel {
public:
    using State = std::variant<MspState, EnergyState, MahalanobisState, KnnState, ReactState>;

    static DetectorModel msp();
    static DetectorModel energy(double temperature = 1.0);
    explicit DetectorModel(State state);

    DetectorKind kind() const noexcept;
    ScoreInput input() const noexcept;
    // Expected input width, or nullopt when any width >= 2 is accepted.
    std::optional<std::size_t> input_dim() const noexcept;

    double score(std::span<const double> row) const;

    // Scores every row of the block this detector reads. Throws
    // NotApplicableError when the block is absent.
    std::vector<double> score_all(const FeatureSet& set, std::size_t workers = 1) const;

    const State& state() const noexcept { return state_; }

private:
    State state_;
};

struct MahalanobisOptions {
    // nullopt selects 1e-6 * trace(cov) / D.
    std::optional<double> shrinkage;
};

DetectorModel fit_mahalanobis(const FeatureSet& train, const MahalanobisOptions& options = {});
DetectorModel fit_knn(const FeatureSet& train, std::size_t k, bool normalize = true);
DetectorModel fit_react(const FeatureSet& train, double clip_percentile = 90.0);

double score_mahalanobis(const DetectorModel& model, std::span<const double> x);
double score_knn(const DetectorModel& model, std::span<const double> x);
double score_react(const DetectorModel& model, std::span<const double> penultimate);

} // namespace oodkit
