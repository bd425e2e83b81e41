#include "oodkit/detectors/knn_index.hpp"

#include "oodkit/error.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

namespace oodkit {

namespace {

void normalize_in_place(std::span<double> v) {
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) {
        throw ValidationError("knn: cannot L2-normalize a zero vector");
    }
    for (double& x : v) x /= norm;
}

template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
    workers = std::max<std::size_t>(1, std::min(workers, n));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

} // namespace

KnnIndex::KnnIndex(const MatrixF& rows, bool normalize)
    : rows_(static_cast<std::size_t>(rows.rows())), dim_(static_cast<std::size_t>(rows.cols())), normalize_(normalize) {
    if (rows_ == 0 || dim_ == 0) {
        throw ValidationError("knn: index needs at least one non-empty row");
    }
    data_.resize(rows_ * dim_);
    for (std::size_t i = 0; i < rows_; ++i) {
        std::span<double> row(data_.data() + i * dim_, dim_);
        for (std::size_t j = 0; j < dim_; ++j) {
            row[j] = static_cast<double>(rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        }
        if (normalize_) normalize_in_place(row);
    }
}

std::vector<double> KnnIndex::prepare(std::span<const double> query) const {
    if (query.size() != dim_) {
        throw ValidationError("knn: query has dimension " + std::to_string(query.size()) + ", index has " +
                              std::to_string(dim_));
    }
    std::vector<double> q(query.begin(), query.end());
    if (normalize_) normalize_in_place(q);
    return q;
}

double KnnIndex::kth_distance(std::span<const double> query, std::size_t k, std::optional<std::size_t> exclude) const {
    const std::size_t available = rows_ - (exclude ? 1 : 0);
    if (k == 0 || k > available) {
        throw ValidationError("knn: k must lie in [1, " + std::to_string(available) + "]");
    }
    const auto q = prepare(query);
    std::vector<double> d2;
    d2.reserve(rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
        if (exclude && *exclude == i) continue;
        const double* row = data_.data() + i * dim_;
        double acc = 0.0;
        for (std::size_t j = 0; j < dim_; ++j) {
            const double diff = row[j] - q[j];
            acc += diff * diff;
        }
        d2.push_back(acc);
    }
    auto kth = d2.begin() + static_cast<std::ptrdiff_t>(k - 1);
    std::nth_element(d2.begin(), kth, d2.end());
    return std::sqrt(*kth);
}

std::vector<double> KnnIndex::kth_distances(const MatrixF& queries, std::size_t k, std::size_t workers) const {
    const auto n = static_cast<std::size_t>(queries.rows());
    if (n > 0 && static_cast<std::size_t>(queries.cols()) != dim_) {
        throw ValidationError("knn: queries have dimension " + std::to_string(queries.cols()) + ", index has " +
                              std::to_string(dim_));
    }
    std::vector<double> out(n);
    parallel_for(n, workers, [&](std::size_t i) {
        std::vector<double> q(dim_);
        for (std::size_t j = 0; j < dim_; ++j) {
            q[j] = static_cast<double>(queries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        }
        out[i] = kth_distance(q, k);
    });
    return out;
}

std::vector<double> KnnIndex::self_excluded_distances(std::size_t k, std::size_t workers) const {
    std::vector<double> out(rows_);
    parallel_for(rows_, workers, [&](std::size_t i) {
        out[i] = kth_distance(std::span<const double>(data_.data() + i * dim_, dim_), k, i);
    });
    return out;
}

} // namespace oodkit
