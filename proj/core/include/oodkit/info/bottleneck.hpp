#pragma once

#include "oodkit/info/discrete_joint.hpp"

#include <cstddef>
#include <vector>

namespace oodkit::info {

inline constexpr double kSufficiencyTolerance = 1e-9;

struct IbLossSpec {
    double beta = 1.0;

    void validate() const;
};

// Information-bottleneck loss I(x; z) - beta * I(z; y) for a deterministic
// map. Also checks I(x; z) = H(z), which holds for every deterministic z.
double ib_loss(const DiscreteJoint& joint, const RepresentationMap& z, const IbLossSpec& spec);

// z is sufficient for y iff I(x; y | z) <= kSufficiencyTolerance. A true
// result is cross-checked against I(y; z) = I(x; y).
bool is_sufficient(const DiscreteJoint& joint, const RepresentationMap& z);

struct Minimizer {
    RepresentationMap map;
    double loss = 0.0;
    double domain_information = 0.0; // I(x_d; z)
};

struct MinimizerSet {
    std::vector<Minimizer> minimizers;
    double min_loss = 0.0;
    std::size_t partitions_examined = 0;
    std::size_t sufficient_partitions = 0;
    std::size_t minimal_partitions = 0;
    // I(z; y) is identical across all sufficient maps, so the minimizer set
    // cannot depend on beta. Recorded as a diagnostic.
    bool beta_independent = true;
    double max_domain_information = 0.0;
};

inline constexpr std::size_t kMaxEnumerationSupport = 12;

// All sufficient deterministic maps into {0, ..., z_alphabet_size - 1}
// attaining the minimum loss, relabelings included. The search walks set
// partitions of the support (restricted growth strings) because loss and
// I(x_d; z) are invariant under relabeling; each minimal partition is then
// expanded into every injective labeling. Requires independent x_d, x_y,
// labels that depend on x_y only and a single domain on the support.
// Throws InsufficientAlphabetError when no sufficient map exists.
MinimizerSet enumerate_minimizers(const DiscreteJoint& joint, const IbLossSpec& spec, std::size_t z_alphabet_size);

} // namespace oodkit::info
