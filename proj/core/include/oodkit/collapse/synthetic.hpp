#pragma once

#include "oodkit/feature_set.hpp"
#include "oodkit/harness/split.hpp"

#include <cstdint>
#include <vector>

namespace oodkit::collapse {

// Rows are [x_d | x_y]. The x_d block depends only on the domain, the x_y
// block only on the class, and the two are drawn independently.
struct SynthConfig {
    std::size_t d_dim = 12;
    std::size_t y_dim = 6;
    std::size_t n_classes = 6;
    std::size_t n_domains = 3;
    double class_sep = 4.0;  // distance between any two class means
    double domain_sep = 24.0; // distance of each extra domain from domain 0
    double noise_sigma = 1.0; // x_y noise
    double domain_noise_sigma = 3.0; // x_d noise
    std::size_t n_per_cell = 500;
    double heldout_fraction = 1.0 / 3.0;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SyntheticData {
    harness::SplitSpec split;
    FeatureSet train;         // domain 0, ID classes; labels index split.id_classes
    FeatureSet test_id;       // same distribution as train
    FeatureSet test_adjacent; // domain 0, held-out classes; labels are original class ids
    FeatureSet test_far;      // domains 1.., ID classes; labels index split.id_classes
    std::vector<std::int32_t> far_domains; // per row of test_far
};

// Class means sit on a regular simplex (class c at class_sep / sqrt(2) * e_c
// in the x_y block), domain 0 at the origin of the x_d block and domain j at
// domain_sep times a random unit vector. Deterministic per seed.
SyntheticData generate_synthetic(const SynthConfig& config);

} // namespace oodkit::collapse
