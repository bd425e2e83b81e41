#include "commands.hpp"

#include <oodkit/error.hpp>
#include <oodkit/harness/benchmark.hpp>
#include <oodkit/harness/split.hpp>
#include <oodkit/info/theory_sweep.hpp>
#include <oodkit/io/manifest.hpp>
#include <oodkit/io/oodf.hpp>

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

namespace oodkit::cli {

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    const std::filesystem::path target(path);
    auto tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write '" + tmp.string() + "'");
        out << text;
        if (!out) throw IoError("error writing '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) throw IoError("cannot move '" + tmp.string() + "' into place: " + ec.message());
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

int run_split(const SplitArgs& args) {
    std::vector<std::int32_t> labels = args.labels;
    if (labels.empty()) {
        if (args.classes == 0) throw ValidationError("split: give --labels or --classes");
        labels.resize(args.classes);
        std::iota(labels.begin(), labels.end(), 0);
    }
    const auto split = harness::make_adjacent_split(labels, args.seed, args.fraction);
    emit(args.out, harness::split_to_json(split));
    return 0;
}

int run_calibrate(const CalibrateArgs& args) {
    const auto manifest = io::load_manifest(args.manifest);
    const auto record = harness::calibrate_manifest(manifest, args.workers);
    emit(args.out, harness::calibration_to_json(record));
    for (const auto& e : record.entries) {
        std::cerr << "seed " << e.seed << ": t_d = " << e.threshold << " (p = " << e.percentile << ", K = " << e.k
                  << ")\n";
    }
    return 0;
}

int run_eval(const EvalArgs& args) {
    const auto manifest = io::load_manifest(args.manifest);
    harness::CalibrationRecord calibration;
    harness::BenchmarkOptions options;
    options.workers = args.workers;
    if (!args.calibration.empty()) {
        calibration = harness::calibration_from_json(slurp(args.calibration));
        options.calibration = &calibration;
    }
    std::vector<harness::HistogramRecord> histograms;
    if (!args.histograms.empty()) options.histogram_bins = args.histogram_bins;
    const auto report = harness::run_benchmark(manifest, options, &histograms);
    emit(args.out, harness::format_table(report));
    if (!args.summary.empty()) emit(args.summary, harness::format_summary(report));
    if (!args.histograms.empty()) emit(args.histograms, harness::format_histograms(histograms));
    return 0;
}

int run_sweep(const SweepArgs& args) {
    const auto manifest = io::load_manifest(args.manifest);
    const auto grid = args.grid.empty() ? manifest.percentile_grid : args.grid;
    harness::BenchmarkOptions options;
    options.workers = args.workers;
    const auto report = harness::percentile_sweep(manifest, grid, options);
    emit(args.out, harness::format_table(report));
    if (!args.summary.empty()) emit(args.summary, harness::format_summary(report));
    if (!report.flag_rates_monotone) {
        std::cerr << "warning: stage-one flag rate increased with the percentile on some seed\n";
    }
    return 0;
}

int run_verify_theory(const VerifyTheoryArgs& args) {
    info::TheorySweepConfig config;
    config.instances = args.instances;
    config.min_support = args.min_support;
    config.max_support = args.max_support;
    config.betas = args.betas;
    config.max_alphabet = args.max_alphabet;
    config.seed = args.seed;
    const auto theory = info::run_theory_sweep(config);
    const auto lemmas = info::run_lemma_sweep(args.lemma_instances, args.seed, args.max_support);
    emit(args.out, info::format_theory_report(theory, lemmas));
    if (!args.summary.empty()) emit(args.summary, info::theory_summary_json(theory, lemmas));
    return theory.counterexamples == 0 && lemmas.violations == 0 ? 0 : 1;
}

int run_report(const ReportArgs& args) {
    const auto rows = harness::parse_table(slurp(args.table));
    emit(args.out, harness::format_summary(harness::assemble_report(rows)));
    return 0;
}

int run_inspect(const InspectArgs& args) {
    io::OodfInfo info;
    const auto set = io::read_feature_file(args.file, &info);
    const auto& h = info.header;
    std::ostringstream out;
    out << "file: " << args.file << "\n";
    out << "format: OODF v" << h.version << "\n";
    out << "n_rows: " << h.n_rows << "\n";
    out << "feat_dim: " << h.feat_dim << "\n";
    out << "n_classes: " << h.n_classes << "\n";
    out << "penult_dim: " << h.penult_dim << "\n";
    out << "blocks: features";
    if (h.flags & io::kHasLogits) out << " logits";
    if (h.flags & io::kHasPenultimate) out << " penultimate";
    if (h.flags & io::kHasHead) out << " head";
    if (h.flags & io::kHasLabels) out << " labels";
    out << "\n";
    out << "sidecar_len: " << h.sidecar_len << "\n";
    out << "digest: sha256:" << info.digest << "\n";
    out << "source: " << set.meta.source << "\n";
    out << "split: " << set.meta.split << "\n";
    out << "seed: " << set.meta.seed << "\n";
    std::cout << out.str();
    return 0;
}

} // namespace oodkit::cli
