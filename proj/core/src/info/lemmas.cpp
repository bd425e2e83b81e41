#include "oodkit/info/lemmas.hpp"

#include "oodkit/info/bottleneck.hpp"
#include "oodkit/info/measures.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace oodkit::info {

namespace {

// True when the symbol at each support point is determined by the chosen
// coordinate alone.
bool depends_only_on(const DiscreteJoint& joint, const RepresentationMap& z, bool on_class_feature) {
    std::map<std::size_t, int> seen;
    const auto& support = joint.support();
    for (std::size_t i = 0; i < support.size(); ++i) {
        const std::size_t key = on_class_feature ? support[i].f : support[i].d;
        const auto [it, inserted] = seen.emplace(key, z.symbols[i]);
        if (!inserted && it->second != z.symbols[i]) {
            return false;
        }
    }
    return true;
}

} // namespace

bool LemmaReport::all_hold() const {
    return std::all_of(checks.begin(), checks.end(), [](const LemmaCheck& c) { return !c.applicable || c.holds; });
}

std::size_t LemmaReport::violations() const {
    return static_cast<std::size_t>(
        std::count_if(checks.begin(), checks.end(), [](const LemmaCheck& c) { return c.applicable && !c.holds; }));
}

LemmaReport verify_lemmas(const DiscreteJoint& joint, const RepresentationMap& z) {
    z.validate(joint);
    LemmaReport report;

    const double i_xz = mutual_information(joint, vars::x, vars::z, &z);
    const double i_zy = mutual_information(joint, vars::z, vars::y, &z);
    const double i_xy = mutual_information(joint, vars::x, vars::y);
    const double h_z = joint_entropy(joint, vars::z, &z);
    const bool sufficient = conditional_mi(joint, vars::x, vars::y, vars::z, &z) <= kSufficiencyTolerance;

    report.checks.push_back({"sufficiency_lower_bound/relevance", true, i_xz >= i_zy - kLemmaTolerance, i_xz, i_zy,
                             "I(x;z) >= I(z;y)"});

    LemmaCheck bound{"sufficiency_lower_bound/label", sufficient, true, i_xz, i_xy, "I(x;z) >= I(x;y)"};
    if (sufficient) {
        bound.holds = i_xz >= i_xy - kLemmaTolerance;
    } else {
        bound.detail += " (z not sufficient)";
    }
    report.checks.push_back(bound);

    report.checks.push_back({"loss_factorization", true, std::abs(i_xz - h_z) <= kLemmaTolerance, i_xz, h_z,
                             "I(x;z) = H(z)"});

    LemmaCheck noise{"independent_noise_invariance", false, true, 0.0, 0.0, ""};
    const bool independent = mutual_information(joint, vars::xd, vars::xy) <= kLemmaTolerance;
    if (!independent) {
        noise.detail = "x_d and x_y are dependent";
    } else if (depends_only_on(joint, z, true)) {
        noise.applicable = true;
        noise.lhs = conditional_mi(joint, vars::xy, vars::z, vars::xd, &z);
        noise.rhs = mutual_information(joint, vars::xy, vars::z, &z);
        noise.detail = "I(x_y;z|x_d) = I(x_y;z)";
    } else if (depends_only_on(joint, z, false)) {
        noise.applicable = true;
        noise.lhs = conditional_mi(joint, vars::xd, vars::z, vars::xy, &z);
        noise.rhs = mutual_information(joint, vars::xd, vars::z, &z);
        noise.detail = "I(x_d;z|x_y) = I(x_d;z)";
    } else {
        noise.detail = "z depends on both parts";
    }
    if (noise.applicable) {
        noise.holds = std::abs(noise.lhs - noise.rhs) <= kLemmaTolerance;
    }
    report.checks.push_back(noise);

    const bool preserves = std::abs(i_zy - i_xy) <= kSufficiencyTolerance;
    report.checks.push_back({"sufficiency_equivalence", true, sufficient == preserves, i_zy, i_xy,
                             "sufficient(z) <=> I(y;z) = I(x;y)"});
    return report;
}

} // namespace oodkit::info
