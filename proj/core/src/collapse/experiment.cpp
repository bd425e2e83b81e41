#include "oodkit/collapse/experiment.hpp"

#include "oodkit/detectors/detector_model.hpp"
#include "oodkit/harness/metrics.hpp"
#include "oodkit/rng.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <sstream>

namespace oodkit::collapse {

namespace {

MatrixF stack(const MatrixF& a, const MatrixF& b) {
    MatrixF out(a.rows() + b.rows(), a.cols());
    out.topRows(a.rows()) = a;
    out.bottomRows(b.rows()) = b;
    return out;
}

std::vector<double> negate(std::vector<double> v) {
    for (double& x : v) x = -x;
    return v;
}

nlohmann::ordered_json probe_json(const ProbeResult& p) {
    nlohmann::ordered_json j;
    j["error_rate"] = p.error_rate;
    j["bound_nats"] = p.bound;
    j["bound_fraction_of_domain_entropy"] = p.bound / p.domain_entropy;
    j["domain_entropy_nats"] = p.domain_entropy;
    j["domains"] = p.domains;
    j["train_rows"] = p.train_rows;
    j["heldout_rows"] = p.heldout_rows;
    return j;
}

std::string fmt(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

} // namespace

CollapseReport collapse_experiment(const CollapseConfig& config) {
    const auto data = generate_synthetic(config.synth);
    CollapseReport report;
    report.seed = config.synth.seed;
    report.split = data.split;

    auto train_cfg = config.train;
    train_cfg.seed = config.synth.seed;
    const auto model = train_linear(data.train, train_cfg);
    report.weight_ratio = block_norm_ratio(model, config.synth.d_dim);
    report.epochs = model.epochs;
    report.converged = model.converged;
    report.train_accuracy = model.accuracy(data.train.features, *data.train.labels);
    report.test_accuracy = model.accuracy(data.test_id.features, *data.test_id.labels);

    const auto sup_train = supervised_view(model, data.train, true);
    const auto sup_test = supervised_view(model, data.test_id, true);
    const auto sup_adjacent = supervised_view(model, data.test_adjacent, false);
    const auto sup_far = supervised_view(model, data.test_far, false);

    // Probe on ID test plus far rows, domain 0 first.
    std::vector<std::int32_t> domains(data.test_id.rows(), 0);
    domains.insert(domains.end(), data.far_domains.begin(), data.far_domains.end());
    auto probe_cfg = config.probe;
    probe_cfg.seed = config.synth.seed;
    report.probe_raw = probe_domain_mi_bound(stack(data.test_id.features, data.test_far.features), domains, probe_cfg);
    report.probe_logits = probe_domain_mi_bound(stack(*sup_test.logits, *sup_far.logits), domains, probe_cfg);

    // Stage one on raw features, second stage KNN on logits.
    const auto filter = DomainFilter::calibrate(data.train, config.filter);
    report.threshold = filter.threshold();
    const auto second = fit_knn(sup_train, config.knn_k, config.knn_normalize);
    const TwoStageDetector detector(filter, second, sup_train);

    const auto id_dist = filter.distances(data.test_id, config.workers);
    std::size_t flagged = 0;
    for (double d : id_dist) flagged += d > filter.threshold();
    report.id_flag_rate = static_cast<double>(flagged) / static_cast<double>(id_dist.size());

    const auto s_id = second.score_all(sup_test, config.workers);
    const auto s_far = second.score_all(sup_far, config.workers);
    const auto s_adjacent = second.score_all(sup_adjacent, config.workers);
    const std::vector<TwoStageDetector::BatchView> batches{{&data.test_id, &sup_test}, {&data.test_far, &sup_far}};
    const auto combined = detector.score_batches(batches, config.workers);
    const auto f_id = negate(id_dist);
    const auto f_adjacent = negate(filter.distances(data.test_adjacent, config.workers));

    report.far_fpr_second_stage = harness::fpr_at_tpr(s_id, s_far);
    report.far_auroc_second_stage = harness::auroc(s_id, s_far);
    report.far_fpr_two_stage = harness::fpr_at_tpr(combined[0], combined[1]);
    report.far_auroc_two_stage = harness::auroc(combined[0], combined[1]);
    report.adjacent_fpr_filter = harness::fpr_at_tpr(f_id, f_adjacent);
    report.adjacent_auroc_filter = harness::auroc(f_id, f_adjacent);
    report.adjacent_fpr_second_stage = harness::fpr_at_tpr(s_id, s_adjacent);
    report.adjacent_auroc_second_stage = harness::auroc(s_id, s_adjacent);

    if (config.histogram_bins > 0) {
        const auto seed = static_cast<std::int64_t>(report.seed);
        const auto bins = config.histogram_bins;
        report.histograms.push_back({"knn", seed, "far", std::nullopt, harness::score_histogram(s_id, s_far, bins)});
        report.histograms.push_back(
            {"df+knn", seed, "far", filter.percentile(), harness::score_histogram(combined[0], combined[1], bins)});
        report.histograms.push_back({"knn", seed, "adjacent", std::nullopt, harness::score_histogram(s_id, s_adjacent, bins)});
        report.histograms.push_back({"pt-knn", seed, "adjacent", std::nullopt, harness::score_histogram(f_id, f_adjacent, bins)});
    }
    return report;
}

std::string collapse_report_json(const CollapseReport& r) {
    nlohmann::ordered_json j;
    j["format"] = "oodkit-collapse-report";
    j["version"] = 1;
    j["seed"] = r.seed;
    j["id_classes"] = r.split.id_classes;
    j["heldout_classes"] = r.split.heldout_classes;
    nlohmann::ordered_json training;
    training["weight_ratio_domain_over_class"] = r.weight_ratio;
    training["epochs"] = r.epochs;
    training["converged"] = r.converged;
    training["train_accuracy"] = r.train_accuracy;
    training["test_accuracy"] = r.test_accuracy;
    j["training"] = std::move(training);
    nlohmann::ordered_json mi;
    mi["raw_features"] = probe_json(r.probe_raw);
    mi["supervised_logits"] = probe_json(r.probe_logits);
    j["domain_information_bound"] = std::move(mi);
    nlohmann::ordered_json det;
    det["filter_threshold"] = r.threshold;
    det["id_flag_rate"] = r.id_flag_rate;
    det["far_fpr95_second_stage"] = r.far_fpr_second_stage;
    det["far_fpr95_two_stage"] = r.far_fpr_two_stage;
    det["far_auroc_second_stage"] = r.far_auroc_second_stage;
    det["far_auroc_two_stage"] = r.far_auroc_two_stage;
    det["adjacent_fpr95_filter_only"] = r.adjacent_fpr_filter;
    det["adjacent_auroc_filter_only"] = r.adjacent_auroc_filter;
    det["adjacent_fpr95_second_stage"] = r.adjacent_fpr_second_stage;
    det["adjacent_auroc_second_stage"] = r.adjacent_auroc_second_stage;
    j["detection"] = std::move(det);
    j["untested"] = nlohmann::ordered_json::array(
        {"re-collapse of domain features through catastrophic forgetting during fine-tuning has no linear analogue "
         "and is not simulated"});
    return j.dump(2) + "\n";
}

std::string format_collapse_report(const CollapseReport& r) {
    std::ostringstream out;
    out << "seed " << r.seed << "\n";
    out << "  training: ||W_d||/||W_y|| = " << fmt(r.weight_ratio) << ", epochs " << r.epochs
        << (r.converged ? "" : " (epoch cap)") << ", accuracy train " << fmt(r.train_accuracy) << " test "
        << fmt(r.test_accuracy) << "\n";
    out << "  domain information bound (fraction of H(d) = " << fmt(r.probe_raw.domain_entropy) << " nats):"
        << " raw " << fmt(r.probe_raw.bound / r.probe_raw.domain_entropy) << " (probe error "
        << fmt(r.probe_raw.error_rate) << "), logits " << fmt(r.probe_logits.bound / r.probe_logits.domain_entropy)
        << " (probe error " << fmt(r.probe_logits.error_rate) << ")\n";
    out << "  far FPR@95: second stage " << fmt(r.far_fpr_second_stage) << ", two-stage " << fmt(r.far_fpr_two_stage)
        << " (t_d " << fmt(r.threshold) << ", ID flag rate " << fmt(r.id_flag_rate) << ")\n";
    out << "  adjacent AUROC: filter only " << fmt(r.adjacent_auroc_filter) << ", second stage "
        << fmt(r.adjacent_auroc_second_stage) << "\n";
    return out.str();
}

} // namespace oodkit::collapse
