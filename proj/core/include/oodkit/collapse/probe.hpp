#pragma once

#include "oodkit/collapse/linear_model.hpp"
#include "oodkit/feature_set.hpp"

#include <cstdint>
#include <span>

namespace oodkit::collapse {

struct ProbeConfig {
    double train_fraction = 0.7;
    TrainConfig trainer{0.5, 1e-4, 300, 0, 1e-6, 0};
    std::uint64_t seed = 0;
};

struct ProbeResult {
    double error_rate = 0.0; // held-out error of the domain probe
    double bound = 0.0;      // certified lower bound on I(representation; domain), nats
    double domain_entropy = 0.0;
    std::size_t domains = 0;
    std::size_t train_rows = 0;
    std::size_t heldout_rows = 0;
};

// Fits a linear domain probe on a random train split (standardized with
// train statistics) and turns its held-out error into a Fano lower bound.
// Domain labels may be any integers; at least two distinct values needed.
ProbeResult probe_domain_mi_bound(const MatrixF& representation, std::span<const std::int32_t> domains,
                                  const ProbeConfig& config = {});

} // namespace oodkit::collapse
