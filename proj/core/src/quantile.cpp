#include "oodkit/quantile.hpp"

#include "oodkit/error.hpp"

#include <algorithm>
#include <cmath>

namespace oodkit {

std::size_t nearest_rank(std::size_t n, double fraction) {
    if (n == 0) {
        throw ValidationError("nearest_rank: empty sample");
    }
    if (!(fraction >= 0.0 && fraction <= 1.0)) {
        throw ValidationError("nearest_rank: fraction must lie in [0, 1]");
    }
    const double exact = fraction * static_cast<double>(n);
    const double slack = 1e-9 * std::max(1.0, exact);
    const auto rank = static_cast<std::size_t>(std::ceil(exact - slack));
    return std::clamp<std::size_t>(rank, 1, n);
}

double nearest_rank_quantile(std::span<const double> values, double fraction) {
    const std::size_t rank = nearest_rank(values.size(), fraction);
    std::vector<double> copy(values.begin(), values.end());
    auto it = copy.begin() + static_cast<std::ptrdiff_t>(rank - 1);
    std::nth_element(copy.begin(), it, copy.end());
    return *it;
}

} // namespace oodkit
