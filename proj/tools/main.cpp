#include "commands.hpp"

#include <oodkit/error.hpp>

#include <CLI11.hpp>

#include <functional>
#include <iostream>

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

} // namespace

int main(int argc, char** argv) {
    using namespace oodkit::cli;

    CLI::App app{"oodkit: feature-space OOD detection toolkit.\n"
                 "Scores are oriented so that higher means more in-distribution; a two-stage\n"
                 "decision flags OOD when the filter rejects or the score is below tau."};
    app.require_subcommand(1);
    std::function<int()> action;

    SplitArgs split;
    auto* split_cmd = app.add_subcommand("split", "Hold out a fraction of classes as adjacent OOD");
    split_cmd->add_option("--labels", split.labels, "Class labels (default 0..classes-1)")->delimiter(',');
    split_cmd->add_option("--classes", split.classes, "Number of classes when --labels is omitted");
    split_cmd->add_option("--seed", split.seed, "Split seed");
    split_cmd->add_option("--fraction", split.fraction, "Held-out fraction")->capture_default_str();
    split_cmd->add_option("-o,--out", split.out, "Output JSON (default stdout)");
    split_cmd->callback([&] { action = [&] { return run_split(split); }; });

    CalibrateArgs calibrate;
    auto* cal_cmd = app.add_subcommand("calibrate", "Fit the domain filter threshold for every run of a manifest");
    cal_cmd->add_option("-m,--manifest", calibrate.manifest, "Benchmark manifest")->required();
    cal_cmd->add_option("-o,--out", calibrate.out, "Calibration record (default stdout)");
    cal_cmd->add_option("--workers", calibrate.workers, "Scoring threads")->capture_default_str();
    cal_cmd->callback([&] { action = [&] { return run_calibrate(calibrate); }; });

    EvalArgs eval;
    auto* eval_cmd = app.add_subcommand("eval", "Run the benchmark described by a manifest");
    eval_cmd->add_option("-m,--manifest", eval.manifest, "Benchmark manifest")->required();
    eval_cmd->add_option("--calibration", eval.calibration, "Calibration record from 'calibrate'");
    eval_cmd->add_option("-o,--out", eval.out, "Result table, TSV (default stdout)");
    eval_cmd->add_option("--summary", eval.summary, "Also write the text summary here");
    eval_cmd->add_option("--histograms", eval.histograms, "Write score histograms (TSV) here");
    eval_cmd->add_option("--bins", eval.histogram_bins, "Histogram bins")->capture_default_str();
    eval_cmd->add_option("--workers", eval.workers, "Scoring threads")->capture_default_str();
    eval_cmd->callback([&] { action = [&] { return run_eval(eval); }; });

    SweepArgs sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "Evaluate two-stage methods over a grid of filter percentiles");
    sweep_cmd->add_option("-m,--manifest", sweep.manifest, "Benchmark manifest")->required();
    sweep_cmd->add_option("--grid", sweep.grid, "Percentiles (default from manifest)")->delimiter(',');
    sweep_cmd->add_option("-o,--out", sweep.out, "Result table, TSV (default stdout)");
    sweep_cmd->add_option("--summary", sweep.summary, "Also write the text summary here");
    sweep_cmd->add_option("--workers", sweep.workers, "Scoring threads")->capture_default_str();
    sweep_cmd->callback([&] { action = [&] { return run_sweep(sweep); }; });

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "Run the synthetic collapse experiment and write a benchmark");
    synth_cmd->add_option("--config", synth.config, "JSON file with SynthConfig fields");
    synth_cmd->add_option("--out-dir", synth.out_dir, "Output directory")->required();
    synth_cmd->add_option("--seeds", synth.seeds, "Seeds")->delimiter(',');
    synth_cmd->add_option("--n-per-cell", synth.n_per_cell, "Samples per (domain, class) cell");
    synth_cmd->add_option("--d-dim", synth.d_dim, "Domain block width");
    synth_cmd->add_option("--y-dim", synth.y_dim, "Class block width");
    synth_cmd->add_option("--classes", synth.classes, "Number of classes");
    synth_cmd->add_option("--domains", synth.domains, "Number of domains");
    synth_cmd->add_option("--class-sep", synth.class_sep, "Distance between class means");
    synth_cmd->add_option("--domain-sep", synth.domain_sep, "Distance of extra domains from domain 0");
    synth_cmd->add_option("--noise", synth.noise, "Class block noise sigma");
    synth_cmd->add_option("--domain-noise", synth.domain_noise, "Domain block noise sigma");
    synth_cmd->add_option("--weight-decay", synth.weight_decay, "Classifier weight decay");
    synth_cmd->add_option("--workers", synth.workers, "Scoring threads")->capture_default_str();
    synth_cmd->callback([&] { action = [&] { return run_synth(synth); }; });

    VerifyTheoryArgs theory;
    auto* theory_cmd = app.add_subcommand("verify-theory", "Check domain feature collapse and the lemmas on random joints");
    theory_cmd->add_option("--instances", theory.instances, "Random joints")->capture_default_str();
    theory_cmd->add_option("--min-support", theory.min_support, "Smallest support")->capture_default_str();
    theory_cmd->add_option("--max-support", theory.max_support, "Largest support (<= 12)")->capture_default_str();
    theory_cmd->add_option("--betas", theory.betas, "Trade-off coefficients")->delimiter(',');
    theory_cmd->add_option("--max-alphabet", theory.max_alphabet, "Largest representation alphabet")->capture_default_str();
    theory_cmd->add_option("--lemma-instances", theory.lemma_instances, "Random (joint, map) pairs")->capture_default_str();
    theory_cmd->add_option("--seed", theory.seed, "Sweep seed");
    theory_cmd->add_option("-o,--out", theory.out, "Text report (default stdout)");
    theory_cmd->add_option("--summary", theory.summary, "Machine-readable JSON summary");
    theory_cmd->callback([&] { action = [&] { return run_verify_theory(theory); }; });

    ReportArgs report;
    auto* report_cmd = app.add_subcommand("report", "Summarize a result table in the in / out layout");
    report_cmd->add_option("table", report.table, "Result table from 'eval' or 'sweep'")->required();
    report_cmd->add_option("-o,--out", report.out, "Summary (default stdout)");
    report_cmd->callback([&] { action = [&] { return run_report(report); }; });

    InspectArgs inspect;
    auto* inspect_cmd = app.add_subcommand("inspect", "Validate an OODF file and print its header");
    inspect_cmd->add_option("file", inspect.file, "OODF file")->required();
    inspect_cmd->callback([&] { action = [&] { return run_inspect(inspect); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return kExitValidation;
    }

    try {
        return action();
    } catch (const oodkit::FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const oodkit::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
}
