#pragma once

#include "oodkit/info/discrete_joint.hpp"
#include "oodkit/rng.hpp"

#include <cstddef>
#include <vector>

namespace oodkit::info {

// Dirichlet(1, ..., 1) draw (normalized exponentials).
std::vector<double> sample_flat_dirichlet(CounterRng& rng, std::size_t n);

struct JointShape {
    std::size_t min_support = 2;
    std::size_t max_support = 9;
};

// Single-domain joint: x_d and x_y independent with Dirichlet(1) marginals,
// f_y a random surjection of the x_y alphabet onto at least two labels and
// f_d constant.
DiscreteJoint sample_single_domain_joint(CounterRng& rng, const JointShape& shape = {});

// Product joint whose labels may depend on both parts (f_y random over
// cells); used to exercise identities outside the collapse hypotheses.
DiscreteJoint sample_product_joint(CounterRng& rng, const JointShape& shape = {});

// Uniform random map from the support into {0, ..., alphabet - 1}.
RepresentationMap sample_map(CounterRng& rng, const DiscreteJoint& joint, std::size_t alphabet);

// Random map that reads x_y only.
RepresentationMap sample_class_feature_map(CounterRng& rng, const DiscreteJoint& joint, std::size_t alphabet);

} // namespace oodkit::info
