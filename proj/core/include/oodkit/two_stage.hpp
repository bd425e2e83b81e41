#pragma once

#include "oodkit/detectors/detector_model.hpp"
#include "oodkit/feature_set.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace oodkit {

inline constexpr double kDefaultFilterPercentile = 0.99;
inline constexpr std::size_t kDefaultFilterK = 50;

// Nearest-rank p-quantile of k-th-neighbour distances: the ceil(p*n)-th
// smallest value. Requires at least 10 distances and p in (0, 1].
double calibrate_domain_threshold(std::span<const double> train_distances, double p);

struct FilterOptions {
    double percentile = kDefaultFilterPercentile;
    std::size_t k = kDefaultFilterK;
    bool normalize = true;
};

// Stage one: reject inputs whose k-th-neighbour distance in the pretrained
// space exceeds the calibrated threshold.
class DomainFilter {
public:
    // Fits the index on `pretrained_train` and calibrates the threshold on
    // leave-one-out distances of the same rows.
    static DomainFilter calibrate(const FeatureSet& pretrained_train, const FilterOptions& options = {});

    // Reuses a threshold recorded by an earlier calibration.
    static DomainFilter with_threshold(const FeatureSet& pretrained_train, const FilterOptions& options,
                                       double threshold);

    double threshold() const noexcept { return threshold_; }
    double percentile() const noexcept { return options_.percentile; }
    std::size_t k() const noexcept { return options_.k; }
    bool normalize() const noexcept { return options_.normalize; }
    std::size_t dim() const noexcept { return index_.dim(); }
    const std::vector<double>& calibration_distances() const noexcept { return calibration_; }

    double distance(std::span<const double> x) const;
    std::vector<double> distances(const FeatureSet& pretrained, std::size_t workers = 1) const;
    bool rejects(std::span<const double> x) const { return distance(x) > threshold_; }

private:
    DomainFilter(KnnIndex index, FilterOptions options, double threshold, std::vector<double> calibration);

    KnnIndex index_;
    FilterOptions options_;
    double threshold_ = 0.0;
    std::vector<double> calibration_;
};

// Domain filter composed with a second-stage detector that runs in a
// different (supervised) representation space. Every filtered sample scores
// strictly below every unfiltered one; filtered samples are ordered by
// their excess distance.
class TwoStageDetector {
public:
    // `calibration` holds ID samples in the second-stage space; the score
    // floor is placed one score range below their minimum.
    TwoStageDetector(DomainFilter filter, DetectorModel second_stage, const FeatureSet& calibration);

    const DomainFilter& filter() const noexcept { return filter_; }
    const DetectorModel& second_stage() const noexcept { return second_; }
    double score_floor() const noexcept { return floor_; }

    void set_tau(double tau) { tau_ = tau; }
    std::optional<double> tau() const noexcept { return tau_; }

    // Single-sample composition using the calibrated floor.
    double score(std::span<const double> x_pretrained, std::span<const double> x_supervised) const;

    // Batch composition. The floor is lowered below any unfiltered score in
    // the batch that falls under the calibrated floor, so the ranking
    // contract holds for the whole batch.
    std::vector<double> score_batch(const FeatureSet& pretrained, const FeatureSet& supervised,
                                    std::size_t workers = 1) const;

    struct BatchView {
        const FeatureSet* pretrained;
        const FeatureSet* supervised;
    };

    // Several batches sharing one floor, e.g. ID test and OOD sets that are
    // ranked against each other.
    std::vector<std::vector<double>> score_batches(std::span<const BatchView> batches, std::size_t workers = 1) const;

    // Stage-one reject flags for a batch.
    std::vector<bool> filter_flags(const FeatureSet& pretrained, std::size_t workers = 1) const;

    // true = OOD. Stage-one rejection, else second-stage score < tau (ties
    // are in-distribution). Throws ConfigError when tau is unset.
    bool decide(std::span<const double> x_pretrained, std::span<const double> x_supervised) const;

private:
    void check_supervised_width(std::span<const double> x) const;

    DomainFilter filter_;
    DetectorModel second_;
    double floor_ = 0.0;
    std::optional<double> tau_;
};

} // namespace oodkit
