#pragma once

#include "oodkit/info/discrete_joint.hpp"

#include <span>

namespace oodkit::info {

// Shannon entropy in nats with 0 ln 0 = 0. Input must be non-negative and
// sum to one within 1e-9.
double entropy(std::span<const double> pmf);

// H_b(p) in nats.
double binary_entropy(double p);

// H(a) for a joint selection of variables. `z` is required when the
// selection includes vars::z.
double joint_entropy(const DiscreteJoint& joint, Vars a, const RepresentationMap* z = nullptr);

// I(a; b) = H(a) + H(b) - H(a, b), clamped at zero.
double mutual_information(const DiscreteJoint& joint, Vars a, Vars b, const RepresentationMap* z = nullptr);

// I(a; b | c) = H(a, c) + H(b, c) - H(a, b, c) - H(c), clamped at zero.
double conditional_mi(const DiscreteJoint& joint, Vars a, Vars b, Vars given,
                      const RepresentationMap* z = nullptr);

inline constexpr double kNatsPerBit = 0.69314718055994530942;

inline double to_bits(double nats) { return nats / kNatsPerBit; }

} // namespace oodkit::info
