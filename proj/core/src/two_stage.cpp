#include "oodkit/two_stage.hpp"

#include "oodkit/error.hpp"
#include "oodkit/quantile.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace oodkit {

double calibrate_domain_threshold(std::span<const double> train_distances, double p) {
    if (train_distances.empty()) {
        throw ValidationError("calibrate_domain_threshold: no distances");
    }
    if (train_distances.size() < 10) {
        throw ValidationError("calibrate_domain_threshold: need at least 10 distances, got " +
                              std::to_string(train_distances.size()));
    }
    if (!(p > 0.0 && p <= 1.0)) {
        throw ValidationError("calibrate_domain_threshold: percentile must lie in (0, 1]");
    }
    for (double d : train_distances) {
        if (!std::isfinite(d) || d < 0.0) {
            throw ValidationError("calibrate_domain_threshold: distances must be finite and non-negative");
        }
    }
    return nearest_rank_quantile(train_distances, p);
}

DomainFilter::DomainFilter(KnnIndex index, FilterOptions options, double threshold, std::vector<double> calibration)
    : index_(std::move(index)), options_(options), threshold_(threshold), calibration_(std::move(calibration)) {}

DomainFilter DomainFilter::calibrate(const FeatureSet& pretrained_train, const FilterOptions& options) {
    if (options.k == 0 || options.k >= pretrained_train.rows()) {
        throw ValidationError("domain filter: K must lie in [1, N - 1] for leave-one-out calibration");
    }
    KnnIndex index(pretrained_train.features, options.normalize);
    auto distances = index.self_excluded_distances(options.k);
    const double threshold = calibrate_domain_threshold(distances, options.percentile);
    return DomainFilter(std::move(index), options, threshold, std::move(distances));
}

DomainFilter DomainFilter::with_threshold(const FeatureSet& pretrained_train, const FilterOptions& options,
                                          double threshold) {
    if (options.k == 0 || options.k > pretrained_train.rows()) {
        throw ValidationError("domain filter: K must lie in [1, N]");
    }
    if (!std::isfinite(threshold) || threshold < 0.0) {
        throw ValidationError("domain filter: threshold must be finite and non-negative");
    }
    return DomainFilter(KnnIndex(pretrained_train.features, options.normalize), options, threshold, {});
}

double DomainFilter::distance(std::span<const double> x) const {
    if (x.size() != index_.dim()) {
        throw ValidationError("pretrained space: input has dimension " + std::to_string(x.size()) +
                              ", filter index has " + std::to_string(index_.dim()));
    }
    return index_.kth_distance(x, options_.k);
}

std::vector<double> DomainFilter::distances(const FeatureSet& pretrained, std::size_t workers) const {
    if (pretrained.dim() != index_.dim()) {
        throw ValidationError("pretrained space: features have dimension " + std::to_string(pretrained.dim()) +
                              ", filter index has " + std::to_string(index_.dim()));
    }
    return index_.kth_distances(pretrained.features, options_.k, workers);
}

TwoStageDetector::TwoStageDetector(DomainFilter filter, DetectorModel second_stage, const FeatureSet& calibration)
    : filter_(std::move(filter)), second_(std::move(second_stage)) {
    const auto scores = second_.score_all(calibration);
    if (scores.empty()) {
        throw ValidationError("two-stage: calibration set is empty");
    }
    const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
    floor_ = *lo - std::max(1.0, *hi - *lo);
}

void TwoStageDetector::check_supervised_width(std::span<const double> x) const {
    const auto expected = second_.input_dim();
    if (expected && x.size() != *expected) {
        throw ValidationError("supervised space: input has dimension " + std::to_string(x.size()) +
                              ", second stage expects " + std::to_string(*expected));
    }
}

double TwoStageDetector::score(std::span<const double> x_pretrained, std::span<const double> x_supervised) const {
    check_supervised_width(x_supervised);
    const double d = filter_.distance(x_pretrained);
    if (d <= filter_.threshold()) {
        return second_.score(x_supervised);
    }
    return floor_ - (d - filter_.threshold());
}

std::vector<double> TwoStageDetector::score_batch(const FeatureSet& pretrained, const FeatureSet& supervised,
                                                  std::size_t workers) const {
    const BatchView view{&pretrained, &supervised};
    return std::move(score_batches(std::span<const BatchView>(&view, 1), workers).front());
}

std::vector<std::vector<double>> TwoStageDetector::score_batches(std::span<const BatchView> batches,
                                                                 std::size_t workers) const {
    std::vector<std::vector<double>> distances;
    std::vector<std::vector<double>> scores;
    double floor = floor_;
    for (const auto& b : batches) {
        if (b.pretrained->rows() != b.supervised->rows()) {
            throw ValidationError("two-stage: pretrained and supervised views have different row counts");
        }
        distances.push_back(filter_.distances(*b.pretrained, workers));
        scores.push_back(second_.score_all(*b.supervised, workers));
        const auto& d = distances.back();
        const auto& s = scores.back();
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (d[i] <= filter_.threshold()) {
                floor = std::min(floor, s[i] - 1.0);
            }
        }
    }
    for (std::size_t b = 0; b < scores.size(); ++b) {
        for (std::size_t i = 0; i < scores[b].size(); ++i) {
            if (distances[b][i] > filter_.threshold()) {
                scores[b][i] = floor - (distances[b][i] - filter_.threshold());
            }
        }
    }
    return scores;
}

std::vector<bool> TwoStageDetector::filter_flags(const FeatureSet& pretrained, std::size_t workers) const {
    const auto distances = filter_.distances(pretrained, workers);
    std::vector<bool> flags(distances.size());
    for (std::size_t i = 0; i < distances.size(); ++i) {
        flags[i] = distances[i] > filter_.threshold();
    }
    return flags;
}

bool TwoStageDetector::decide(std::span<const double> x_pretrained, std::span<const double> x_supervised) const {
    if (!tau_) {
        throw ConfigError("two-stage: decision threshold tau is not set");
    }
    check_supervised_width(x_supervised);
    if (filter_.rejects(x_pretrained)) {
        return true;
    }
    return second_.score(x_supervised) < *tau_;
}

} // namespace oodkit
