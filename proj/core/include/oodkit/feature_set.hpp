#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace oodkit {

// Row-major float storage matches the on-disk layout, so a FeatureSet
// round-trips through an OODF file bit for bit.
using MatrixF = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using VectorF = Eigen::VectorXf;

struct FeatureMeta {
    std::string source;
    std::string split;
    std::int64_t seed = 0;

    friend bool operator==(const FeatureMeta&, const FeatureMeta&) = default;
};

// Linear classification head: logits = penultimate * weights^T + bias.
struct ClassifierHead {
    MatrixF weights; // C x P
    VectorF bias;    // C
};

struct FeatureSet {
    MatrixF features; // N x D
    std::optional<MatrixF> logits;
    std::optional<MatrixF> penultimate;
    std::optional<ClassifierHead> head;
    std::optional<std::vector<std::int32_t>> labels;
    FeatureMeta meta;

    std::size_t rows() const noexcept { return static_cast<std::size_t>(features.rows()); }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(features.cols()); }

    // Number of classes implied by logits or head, 0 when neither is present.
    std::size_t class_count() const noexcept;

    std::span<const float> feature_row(std::size_t i) const;
    std::span<const float> logit_row(std::size_t i) const;
    std::span<const float> penultimate_row(std::size_t i) const;

    // Throws ValidationError when an invariant is violated: N >= 1, finite
    // values, consistent shapes, C >= 2, labels in [0, C), and logits equal
    // to penultimate * head^T + bias within 1e-4 when all three are stored.
    void validate() const;

    // Subset of rows in the given order; the head and metadata carry over.
    FeatureSet select_rows(std::span<const std::size_t> rows) const;
};

bool bit_identical(const FeatureSet& a, const FeatureSet& b);

std::vector<double> to_double(std::span<const float> row);

} // namespace oodkit
