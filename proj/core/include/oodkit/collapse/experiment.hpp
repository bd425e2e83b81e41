#pragma once

#include "oodkit/collapse/linear_model.hpp"
#include "oodkit/collapse/probe.hpp"
#include "oodkit/collapse/synthetic.hpp"
#include "oodkit/harness/report.hpp"
#include "oodkit/two_stage.hpp"

#include <string>
#include <vector>

namespace oodkit::collapse {

struct CollapseConfig {
    SynthConfig synth;
    TrainConfig train;
    ProbeConfig probe;
    // Filter on raw features. The synthetic training domain is centred at
    // the origin, so distances are taken without normalization.
    FilterOptions filter{kDefaultFilterPercentile, kDefaultFilterK, false};
    std::size_t knn_k = 50; // second-stage KNN on logits
    bool knn_normalize = false;
    std::size_t histogram_bins = 20;
    std::size_t workers = 1;
};

struct CollapseReport {
    std::uint64_t seed = 0;
    harness::SplitSpec split;

    double weight_ratio = 0.0; // ||W_d||_F / ||W_y||_F
    std::size_t epochs = 0;
    bool converged = false;
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;

    // Probe data: ID test rows (domain 0) plus far rows (domains 1..).
    ProbeResult probe_raw;
    ProbeResult probe_logits;

    double threshold = 0.0;     // t_d
    double id_flag_rate = 0.0;  // stage-one flags on ID test rows
    double far_fpr_second_stage = 0.0;
    double far_fpr_two_stage = 0.0;
    double far_auroc_second_stage = 0.0;
    double far_auroc_two_stage = 0.0;
    double adjacent_fpr_filter = 0.0;
    double adjacent_auroc_filter = 0.0;
    double adjacent_fpr_second_stage = 0.0;
    double adjacent_auroc_second_stage = 0.0;

    std::vector<harness::HistogramRecord> histograms;
};

CollapseReport collapse_experiment(const CollapseConfig& config);

std::string collapse_report_json(const CollapseReport& report);
std::string format_collapse_report(const CollapseReport& report);

} // namespace oodkit::collapse
