#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace oodkit::info {

struct TheorySweepConfig {
    std::size_t instances = 200;
    std::size_t min_support = 2;
    std::size_t max_support = 9;
    std::vector<double> betas{0.5, 1.0, 2.0, 10.0};
    std::size_t max_alphabet = 9;
    std::uint64_t seed = 0;

    void validate() const;
};

struct TheoryInstance {
    std::size_t index = 0;
    std::size_t domain_size = 0;
    std::size_t feature_size = 0;
    std::size_t support = 0;
    std::size_t labels = 0;
    std::size_t alphabet = 0;
    double beta = 0.0;
    bool skipped = false; // alphabet too small for any sufficient map
    std::size_t minimizers = 0;
    std::size_t partitions_examined = 0;
    double min_loss = 0.0;
    double max_domain_information = 0.0;
    bool beta_independent = true;
    bool counterexample = false;
};

struct TheorySweepReport {
    TheorySweepConfig config;
    std::vector<TheoryInstance> instances;
    std::size_t evaluated = 0;
    std::size_t skipped = 0;
    std::size_t counterexamples = 0;
    double max_domain_information = 0.0;
    double seconds = 0.0;
};

inline constexpr double kCollapseTolerance = 1e-9;

// Random single-domain joints; every sufficient loss minimizer must carry
// I(x_d; z) <= kCollapseTolerance.
TheorySweepReport run_theory_sweep(const TheorySweepConfig& config);

struct LemmaSweepReport {
    std::size_t instances = 0;
    std::size_t checks_applied = 0;
    std::size_t violations = 0;
    std::vector<std::string> failures;
};

// Random (joint, map) pairs mixing collapse-style joints, general product
// joints, arbitrary maps, x_y-only maps and label maps.
LemmaSweepReport run_lemma_sweep(std::size_t instances, std::uint64_t seed, std::size_t max_support = 9);

// Plain-text report; theory_summary_json is the machine-readable
// counterpart.
std::string format_theory_report(const TheorySweepReport& theory, const LemmaSweepReport& lemmas);
std::string theory_summary_json(const TheorySweepReport& theory, const LemmaSweepReport& lemmas);

} // namespace oodkit::info
