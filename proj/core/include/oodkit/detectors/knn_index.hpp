#pragma once

#include "oodkit/feature_set.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace oodkit {

// Exact brute-force k-nearest-neighbour index over row vectors in double
// precision. Optionally L2-normalizes rows and queries.
class KnnIndex {
public:
    KnnIndex() = default;
    KnnIndex(const MatrixF& rows, bool normalize);

    std::size_t size() const noexcept { return rows_; }
    std::size_t dim() const noexcept { return dim_; }
    bool normalized() const noexcept { return normalize_; }

    // Euclidean distance to the k-th nearest indexed row (1-based k).
    // `exclude` skips one indexed row, used for leave-one-out calibration.
    double kth_distance(std::span<const double> query, std::size_t k,
                        std::optional<std::size_t> exclude = std::nullopt) const;

    // k-th distances for every row of `queries`; output order follows the
    // input regardless of `workers`.
    std::vector<double> kth_distances(const MatrixF& queries, std::size_t k, std::size_t workers = 1) const;

    // Leave-one-out k-th distances of the indexed rows themselves.
    std::vector<double> self_excluded_distances(std::size_t k, std::size_t workers = 1) const;

private:
    std::vector<double> prepare(std::span<const double> query) const;

    std::size_t rows_ = 0;
    std::size_t dim_ = 0;
    bool normalize_ = false;
    std::vector<double> data_; // row-major
};

} // namespace oodkit
