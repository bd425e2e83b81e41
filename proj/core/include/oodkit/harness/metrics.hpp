#pragma once

#include <span>
#include <vector>

namespace oodkit::harness {

// Scores are in-distribution oriented (higher = more ID).

// False-positive rate at a target true-positive rate. The threshold is the
// nearest-rank (1 - tpr) quantile of the ID scores, i.e. the
// ceil((1 - tpr) * n_id)-th smallest ID score; OOD scores at or above it
// count as false positives.
double fpr_at_tpr(std::span<const double> id_scores, std::span<const double> ood_scores, double tpr = 0.95);

// Threshold used by fpr_at_tpr.
double tpr_threshold(std::span<const double> id_scores, double tpr = 0.95);

// Mann-Whitney AUROC: (#{id > ood} + 0.5 #{id == ood}) / (n_id n_ood),
// counted exactly in integers.
double auroc(std::span<const double> id_scores, std::span<const double> ood_scores);

struct HistogramBin {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t id_count = 0;
    std::size_t ood_count = 0;
};

// Shared-range histogram of ID and OOD scores for plotting.
std::vector<HistogramBin> score_histogram(std::span<const double> id_scores, std::span<const double> ood_scores,
                                          std::size_t bins = 20);

} // namespace oodkit::harness
