#include "oodkit/info/measures.hpp"

#include "oodkit/error.hpp"

#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

namespace oodkit::info {

namespace {

// Anything more negative than this is an arithmetic bug, not roundoff.
constexpr double kHardNegative = 1e-9;

double xlogx(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }

double clamp_information(double value, const char* what) {
    if (value < -kHardNegative) {
        throw std::logic_error(std::string(what) + " is negative beyond roundoff");
    }
    return std::max(value, 0.0);
}

} // namespace

double entropy(std::span<const double> pmf) {
    double total = 0.0;
    for (double p : pmf) {
        if (!std::isfinite(p) || p < 0.0) {
            throw ValidationError("entropy: probabilities must be finite and non-negative");
        }
        total += p;
    }
    if (pmf.empty() || std::abs(total - 1.0) > 1e-9) {
        throw ValidationError("entropy: probabilities must sum to 1");
    }
    double h = 0.0;
    for (double p : pmf) {
        h -= xlogx(p);
    }
    return std::max(h, 0.0);
}

double binary_entropy(double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw ValidationError("binary_entropy: argument must lie in [0, 1]");
    }
    return -xlogx(p) - xlogx(1.0 - p);
}

double joint_entropy(const DiscreteJoint& joint, Vars a, const RepresentationMap* z) {
    if (a.empty()) {
        throw ValidationError("joint_entropy: empty variable selection");
    }
    if (a.has(vars::z)) {
        if (z == nullptr) {
            throw ValidationError("joint_entropy: selection names z but no representation map was given");
        }
        z->validate(joint);
    }
    const auto& support = joint.support();
    if (support.empty()) {
        throw ValidationError("joint_entropy: empty support");
    }
    std::map<std::array<long long, 5>, double> masses;
    for (std::size_t i = 0; i < support.size(); ++i) {
        const auto& pt = support[i];
        std::array<long long, 5> key{-1, -1, -1, -1, -1};
        if (a.has(vars::xd)) key[0] = static_cast<long long>(pt.d);
        if (a.has(vars::xy)) key[1] = static_cast<long long>(pt.f);
        if (a.has(vars::y)) key[2] = pt.label;
        if (a.has(vars::d)) key[3] = pt.domain;
        if (a.has(vars::z)) key[4] = z->symbols[i];
        masses[key] += pt.p;
    }
    double h = 0.0;
    for (const auto& [key, p] : masses) {
        h -= xlogx(p);
    }
    return std::max(h, 0.0);
}

double mutual_information(const DiscreteJoint& joint, Vars a, Vars b, const RepresentationMap* z) {
    const double value = joint_entropy(joint, a, z) + joint_entropy(joint, b, z) - joint_entropy(joint, a | b, z);
    return clamp_information(value, "mutual information");
}

double conditional_mi(const DiscreteJoint& joint, Vars a, Vars b, Vars given, const RepresentationMap* z) {
    if (given.empty()) {
        return mutual_information(joint, a, b, z);
    }
    const double value = joint_entropy(joint, a | given, z) + joint_entropy(joint, b | given, z) -
                         joint_entropy(joint, a | b | given, z) - joint_entropy(joint, given, z);
    return clamp_information(value, "conditional mutual information");
}

} // namespace oodkit::info
