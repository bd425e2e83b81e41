#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace oodkit::cli {

struct SplitArgs {
    std::vector<std::int32_t> labels;
    std::size_t classes = 0;
    std::uint64_t seed = 0;
    double fraction = 1.0 / 3.0;
    std::string out;
};

struct CalibrateArgs {
    std::string manifest;
    std::string out;
    std::size_t workers = 1;
};

struct EvalArgs {
    std::string manifest;
    std::string calibration;
    std::string out;
    std::string summary;
    std::string histograms;
    std::size_t histogram_bins = 20;
    std::size_t workers = 1;
};

struct SweepArgs {
    std::string manifest;
    std::vector<double> grid;
    std::string out;
    std::string summary;
    std::size_t workers = 1;
};

struct SynthArgs {
    std::string config;
    std::string out_dir;
    std::vector<std::uint64_t> seeds{0};
    // Flags override the config file; negative / zero means "not given".
    long long n_per_cell = -1;
    long long d_dim = -1;
    long long y_dim = -1;
    long long classes = -1;
    long long domains = -1;
    double class_sep = -1.0;
    double domain_sep = -1.0;
    double noise = -1.0;
    double domain_noise = -1.0;
    double weight_decay = -1.0;
    std::size_t workers = 1;
};

struct VerifyTheoryArgs {
    std::size_t instances = 200;
    std::size_t min_support = 2;
    std::size_t max_support = 9;
    std::vector<double> betas{0.5, 1.0, 2.0, 10.0};
    std::size_t max_alphabet = 9;
    std::size_t lemma_instances = 500;
    std::uint64_t seed = 0;
    std::string out;
    std::string summary;
};

struct ReportArgs {
    std::string table;
    std::string out;
};

struct InspectArgs {
    std::string file;
};

// Each returns the process exit code; errors propagate as exceptions.
int run_split(const SplitArgs& args);
int run_calibrate(const CalibrateArgs& args);
int run_eval(const EvalArgs& args);
int run_sweep(const SweepArgs& args);
int run_synth(const SynthArgs& args);
int run_verify_theory(const VerifyTheoryArgs& args);
int run_report(const ReportArgs& args);
int run_inspect(const InspectArgs& args);

// Writes to `path`, or to standard output when path is empty or "-".
void emit(const std::string& path, const std::string& text);
std::string slurp(const std::string& path);

} // namespace oodkit::cli
