#include "oodkit/info/fano.hpp"

#include "oodkit/error.hpp"
#include "oodkit/info/measures.hpp"

#include <algorithm>
#include <cmath>

namespace oodkit::info {

namespace {

constexpr double kTolerance = 1e-12;
constexpr double kBisectionWidth = 1e-10;

double fano_lhs(double e, std::size_t cardinality) {
    return binary_entropy(e) + e * std::log(static_cast<double>(cardinality - 1));
}

} // namespace

void FanoQuery::validate() const {
    if (cardinality < 2) {
        throw ValidationError("FanoQuery: cardinality must be at least 2");
    }
    const double ceiling = std::log(static_cast<double>(cardinality));
    if (!std::isfinite(label_entropy) || !std::isfinite(mutual_information) || mutual_information < -kTolerance ||
        mutual_information > label_entropy + kTolerance || label_entropy > ceiling + kTolerance) {
        throw ValidationError("FanoQuery: need 0 <= I(x;y) <= H(y) <= ln|Y|");
    }
}

double fano_min_error(const FanoQuery& query) {
    query.validate();
    const double target = query.label_entropy - query.mutual_information;
    if (target <= 0.0) {
        return 0.0;
    }
    const double max_error = 1.0 - 1.0 / static_cast<double>(query.cardinality);
    if (fano_lhs(max_error, query.cardinality) <= target) {
        return max_error;
    }
    // The left-hand side increases on [0, max_error]; keep hi feasible.
    double lo = 0.0;
    double hi = max_error;
    while (hi - lo > kBisectionWidth) {
        const double mid = 0.5 * (lo + hi);
        if (fano_lhs(mid, query.cardinality) >= target) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

double mi_lower_bound_from_error(double error_rate, std::size_t cardinality, double domain_entropy) {
    if (cardinality < 2) {
        throw ValidationError("mi_lower_bound_from_error: cardinality must be at least 2");
    }
    const double max_error = 1.0 - 1.0 / static_cast<double>(cardinality);
    if (!(error_rate >= 0.0 && error_rate <= max_error + kTolerance)) {
        throw ValidationError("mi_lower_bound_from_error: error rate must lie in [0, 1 - 1/|D|]");
    }
    if (!std::isfinite(domain_entropy) || domain_entropy < 0.0) {
        throw ValidationError("mi_lower_bound_from_error: domain entropy must be finite and non-negative");
    }
    const double e = std::min(error_rate, max_error);
    return std::max(0.0, domain_entropy - fano_lhs(e, cardinality));
}

} // namespace oodkit::info
