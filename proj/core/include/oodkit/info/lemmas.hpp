#pragma once

#include "oodkit/info/discrete_joint.hpp"

#include <string>
#include <vector>

namespace oodkit::info {

inline constexpr double kLemmaTolerance = 1e-12;

struct LemmaCheck {
    std::string name;
    bool applicable = true;
    bool holds = true;
    double lhs = 0.0;
    double rhs = 0.0;
    std::string detail;
};

struct LemmaReport {
    std::vector<LemmaCheck> checks;

    bool all_hold() const;
    std::size_t violations() const;
};

// Instance-level checks of the information identities the collapse argument
// rests on. Inapplicable checks are reported with applicable = false rather
// than thrown.
//   sufficiency_lower_bound       I(x;z) >= I(z;y), and I(x;z) >= I(x;y) when z is sufficient
//   loss_factorization            I(x;z) = H(z)
//   independent_noise_invariance  I(part;z | other) = I(part;z) when z = g(part), parts independent
//   sufficiency_equivalence       sufficient(z) <=> I(y;z) = I(x;y)
LemmaReport verify_lemmas(const DiscreteJoint& joint, const RepresentationMap& z);

} // namespace oodkit::info
