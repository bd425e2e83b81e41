#include "oodkit/feature_set.hpp"

#include "oodkit/error.hpp"

#include <cmath>
#include <cstring>

namespace oodkit {

namespace {

std::span<const float> row_of(const MatrixF& m, std::size_t i) {
    if (i >= static_cast<std::size_t>(m.rows())) {
        throw ValidationError("row index out of range");
    }
    return {m.data() + i * static_cast<std::size_t>(m.cols()), static_cast<std::size_t>(m.cols())};
}

bool all_finite(const float* data, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(data[i])) return false;
    }
    return true;
}

template <typename M>
bool same_bits(const M& a, const M& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() &&
           std::memcmp(a.data(), b.data(), sizeof(float) * static_cast<std::size_t>(a.size())) == 0;
}

MatrixF take_rows(const MatrixF& m, std::span<const std::size_t> rows) {
    MatrixF out(static_cast<Eigen::Index>(rows.size()), m.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        out.row(static_cast<Eigen::Index>(r)) = m.row(static_cast<Eigen::Index>(rows[r]));
    }
    return out;
}

} // namespace

std::size_t FeatureSet::class_count() const noexcept {
    if (logits) return static_cast<std::size_t>(logits->cols());
    if (head) return static_cast<std::size_t>(head->weights.rows());
    return 0;
}

std::span<const float> FeatureSet::feature_row(std::size_t i) const { return row_of(features, i); }

std::span<const float> FeatureSet::logit_row(std::size_t i) const {
    if (!logits) throw NotApplicableError("feature set has no logits");
    return row_of(*logits, i);
}

std::span<const float> FeatureSet::penultimate_row(std::size_t i) const {
    if (!penultimate) throw NotApplicableError("feature set has no penultimate activations");
    return row_of(*penultimate, i);
}

void FeatureSet::validate() const {
    const auto n = features.rows();
    if (n < 1 || features.cols() < 1) {
        throw ValidationError("FeatureSet: need at least one row and one feature column");
    }
    if (!all_finite(features.data(), static_cast<std::size_t>(features.size()))) {
        throw ValidationError("FeatureSet: features contain non-finite values");
    }
    if (logits) {
        if (logits->rows() != n || logits->cols() < 2) {
            throw ValidationError("FeatureSet: logits must be N x C with C >= 2");
        }
        if (!all_finite(logits->data(), static_cast<std::size_t>(logits->size()))) {
            throw ValidationError("FeatureSet: logits contain non-finite values");
        }
    }
    if (penultimate) {
        if (penultimate->rows() != n || penultimate->cols() < 1) {
            throw ValidationError("FeatureSet: penultimate must be N x P");
        }
        if (!all_finite(penultimate->data(), static_cast<std::size_t>(penultimate->size()))) {
            throw ValidationError("FeatureSet: penultimate activations contain non-finite values");
        }
    }
    if (head) {
        if (!penultimate) {
            throw ValidationError("FeatureSet: a classifier head requires penultimate activations");
        }
        if (head->weights.cols() != penultimate->cols() || head->weights.rows() < 2 ||
            head->bias.size() != head->weights.rows()) {
            throw ValidationError("FeatureSet: head must be C x P with a C-vector bias");
        }
        if (logits && logits->cols() != head->weights.rows()) {
            throw ValidationError("FeatureSet: head and logits disagree on the class count");
        }
        if (!all_finite(head->weights.data(), static_cast<std::size_t>(head->weights.size())) ||
            !all_finite(head->bias.data(), static_cast<std::size_t>(head->bias.size()))) {
            throw ValidationError("FeatureSet: head contains non-finite values");
        }
        if (logits) {
            const Eigen::MatrixXd implied =
                (penultimate->cast<double>() * head->weights.cast<double>().transpose()).rowwise() +
                head->bias.cast<double>().transpose();
            if ((implied - logits->cast<double>()).cwiseAbs().maxCoeff() > 1e-4) {
                throw ValidationError("FeatureSet: logits disagree with penultimate * head^T + bias");
            }
        }
    }
    if (labels) {
        if (labels->size() != static_cast<std::size_t>(n)) {
            throw ValidationError("FeatureSet: one label per row required");
        }
        const auto classes = class_count();
        for (auto l : *labels) {
            if (l < 0 || (classes > 0 && static_cast<std::size_t>(l) >= classes)) {
                throw ValidationError("FeatureSet: label outside [0, C)");
            }
        }
    }
}

FeatureSet FeatureSet::select_rows(std::span<const std::size_t> rows) const {
    FeatureSet out;
    out.features = take_rows(features, rows);
    if (logits) out.logits = take_rows(*logits, rows);
    if (penultimate) out.penultimate = take_rows(*penultimate, rows);
    out.head = head;
    if (labels) {
        std::vector<std::int32_t> picked;
        picked.reserve(rows.size());
        for (auto r : rows) picked.push_back(labels->at(r));
        out.labels = std::move(picked);
    }
    out.meta = meta;
    return out;
}

bool bit_identical(const FeatureSet& a, const FeatureSet& b) {
    if (!same_bits(a.features, b.features) || a.meta != b.meta) return false;
    if (a.logits.has_value() != b.logits.has_value() || (a.logits && !same_bits(*a.logits, *b.logits))) return false;
    if (a.penultimate.has_value() != b.penultimate.has_value() ||
        (a.penultimate && !same_bits(*a.penultimate, *b.penultimate)))
        return false;
    if (a.head.has_value() != b.head.has_value()) return false;
    if (a.head && (!same_bits(a.head->weights, b.head->weights) || !same_bits(a.head->bias, b.head->bias)))
        return false;
    return a.labels == b.labels;
}

std::vector<double> to_double(std::span<const float> row) { return {row.begin(), row.end()}; }

} // namespace oodkit
