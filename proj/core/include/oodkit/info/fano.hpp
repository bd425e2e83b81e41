#pragma once

#include <cstddef>

namespace oodkit::info {

struct FanoQuery {
    double label_entropy = 0.0;      // H(y), nats
    double mutual_information = 0.0; // I(x; y), nats
    std::size_t cardinality = 2;     // |Y|

    void validate() const;
};

// Smallest error probability e in [0, 1 - 1/|Y|] with
//     H_b(e) + e ln(|Y| - 1) >= H(y) - I(x; y),
// located by bisection to 1e-10. Non-increasing in the mutual information.
double fano_min_error(const FanoQuery& query);

// Lower bound on I(representation; domain) certified by a domain probe with
// the given error rate: max(0, H(d) - H_b(e) - e ln(|D| - 1)).
double mi_lower_bound_from_error(double error_rate, std::size_t cardinality, double domain_entropy);

} // namespace oodkit::info
