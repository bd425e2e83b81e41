#include "oodkit/info/theory_sweep.hpp"

#include "oodkit/error.hpp"
#include "oodkit/info/bottleneck.hpp"
#include "oodkit/info/lemmas.hpp"
#include "oodkit/info/sampling.hpp"
#include "oodkit/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <sstream>

namespace oodkit::info {

void TheorySweepConfig::validate() const {
    if (instances == 0) {
        throw ValidationError("verify-theory: sweep count must be positive");
    }
    if (min_support < 2 || min_support > max_support || max_support > kMaxEnumerationSupport) {
        throw ValidationError("verify-theory: support bounds must satisfy 2 <= min <= max <= 12");
    }
    if (betas.empty()) {
        throw ValidationError("verify-theory: beta grid is empty");
    }
    for (double b : betas) {
        IbLossSpec{b}.validate();
    }
    if (max_alphabet < 2) {
        throw ValidationError("verify-theory: z alphabet bound must be at least 2");
    }
}

TheorySweepReport run_theory_sweep(const TheorySweepConfig& config) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    TheorySweepReport report;
    report.config = config;
    CounterRng rng(config.seed, /*stream=*/0x7468656f);
    for (std::size_t i = 0; i < config.instances; ++i) {
        const auto joint = sample_single_domain_joint(rng, {config.min_support, config.max_support});
        TheoryInstance inst;
        inst.index = i;
        inst.domain_size = joint.domain_size();
        inst.feature_size = joint.feature_size();
        inst.support = joint.support().size();
        inst.labels = joint.label_count();
        inst.beta = config.betas[rng.below(config.betas.size())];
        const std::size_t upper = std::min(inst.support, config.max_alphabet);
        if (inst.labels > upper) {
            inst.skipped = true;
            inst.alphabet = upper;
            ++report.skipped;
            report.instances.push_back(inst);
            continue;
        }
        inst.alphabet = inst.labels + static_cast<std::size_t>(rng.below(upper - inst.labels + 1));
        const auto result = enumerate_minimizers(joint, IbLossSpec{inst.beta}, inst.alphabet);
        inst.minimizers = result.minimizers.size();
        inst.partitions_examined = result.partitions_examined;
        inst.min_loss = result.min_loss;
        inst.beta_independent = result.beta_independent;
        for (const auto& m : result.minimizers) {
            inst.max_domain_information = std::max(inst.max_domain_information, m.domain_information);
        }
        inst.counterexample = inst.max_domain_information > kCollapseTolerance;
        ++report.evaluated;
        report.counterexamples += inst.counterexample ? 1 : 0;
        report.max_domain_information = std::max(report.max_domain_information, inst.max_domain_information);
        report.instances.push_back(inst);
    }
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

LemmaSweepReport run_lemma_sweep(std::size_t instances, std::uint64_t seed, std::size_t max_support) {
    LemmaSweepReport report;
    CounterRng rng(seed, /*stream=*/0x6c656d6d);
    const JointShape shape{2, max_support};
    for (std::size_t i = 0; i < instances; ++i) {
        const bool collapse_style = rng.below(2) == 0;
        const auto joint = collapse_style ? sample_single_domain_joint(rng, shape) : sample_product_joint(rng, shape);
        const std::size_t alphabet = 1 + static_cast<std::size_t>(rng.below(joint.support().size()));
        RepresentationMap z;
        switch (rng.below(3)) {
        case 0:
            z = sample_map(rng, joint, alphabet);
            break;
        case 1:
            z = sample_class_feature_map(rng, joint, alphabet);
            break;
        default:
            z = RepresentationMap::label(joint);
            break;
        }
        const auto lemma = verify_lemmas(joint, z);
        ++report.instances;
        for (const auto& check : lemma.checks) {
            if (!check.applicable) continue;
            ++report.checks_applied;
            if (!check.holds) {
                ++report.violations;
                std::ostringstream os;
                os << "instance " << i << ": " << check.name << " lhs=" << check.lhs << " rhs=" << check.rhs;
                report.failures.push_back(os.str());
            }
        }
    }
    return report;
}

namespace {

std::size_t count_beta_independent(const TheorySweepReport& theory) {
    std::size_t n = 0;
    for (const auto& inst : theory.instances) {
        if (!inst.skipped && inst.beta_independent) ++n;
    }
    return n;
}

} // namespace

std::string format_theory_report(const TheorySweepReport& theory, const LemmaSweepReport& lemmas) {
    std::ostringstream os;
    char line[256];
    os << "domain feature collapse sweep\n";
    os << "  instances: " << theory.config.instances << " (evaluated " << theory.evaluated << ", skipped "
       << theory.skipped << ")\n";
    os << "  support bounds: [" << theory.config.min_support << ", " << theory.config.max_support
       << "], z alphabet bound: " << theory.config.max_alphabet << ", seed: " << theory.config.seed << "\n";
    std::snprintf(line, sizeof line, "  max I(x_d; z) over minimizers: %.3e nats (%.3e bits)\n",
                  theory.max_domain_information, theory.max_domain_information / 0.69314718055994530942);
    os << line;
    os << "  counterexamples: " << theory.counterexamples << "\n";
    os << "  minimizer set independent of beta: " << count_beta_independent(theory) << "/" << theory.evaluated
       << " (only sufficient maps are searched)\n";
    std::snprintf(line, sizeof line, "  elapsed: %.2f s\n", theory.seconds);
    os << line;
    os << "\n  idx  |Xd| |Xy| supp labels |Z|   beta  minimizers  max I(x_d;z)\n";
    for (const auto& inst : theory.instances) {
        if (inst.skipped) {
            std::snprintf(line, sizeof line, "  %4zu %4zu %4zu %4zu %6zu %3zu %6.2f  skipped (alphabet < labels)\n",
                          inst.index, inst.domain_size, inst.feature_size, inst.support, inst.labels, inst.alphabet,
                          inst.beta);
        } else {
            std::snprintf(line, sizeof line, "  %4zu %4zu %4zu %4zu %6zu %3zu %6.2f %11zu  %.3e%s\n", inst.index,
                          inst.domain_size, inst.feature_size, inst.support, inst.labels, inst.alphabet, inst.beta,
                          inst.minimizers, inst.max_domain_information, inst.counterexample ? "  COUNTEREXAMPLE" : "");
        }
        os << line;
    }
    os << "\ninformation identities sweep\n";
    os << "  instances: " << lemmas.instances << ", checks applied: " << lemmas.checks_applied
       << ", violations: " << lemmas.violations << "\n";
    for (const auto& f : lemmas.failures) {
        os << "  " << f << "\n";
    }
    return os.str();
}

std::string theory_summary_json(const TheorySweepReport& theory, const LemmaSweepReport& lemmas) {
    nlohmann::json j;
    j["theory"] = {{"instances", theory.config.instances},
                   {"evaluated", theory.evaluated},
                   {"skipped", theory.skipped},
                   {"counterexamples", theory.counterexamples},
                   {"beta_independent", count_beta_independent(theory)},
                   {"max_domain_information_nats", theory.max_domain_information},
                   {"seed", theory.config.seed},
                   {"min_support", theory.config.min_support},
                   {"max_support", theory.config.max_support},
                   {"max_alphabet", theory.config.max_alphabet},
                   {"betas", theory.config.betas},
                   {"seconds", theory.seconds}};
    j["lemmas"] = {{"instances", lemmas.instances},
                   {"checks_applied", lemmas.checks_applied},
                   {"violations", lemmas.violations}};
    j["passed"] = theory.counterexamples == 0 && lemmas.violations == 0;
    return j.dump(2) + "\n";
}

} // namespace oodkit::info
