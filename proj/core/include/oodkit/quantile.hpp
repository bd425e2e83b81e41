#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace oodkit {

// 1-based nearest rank ceil(fraction * n), clamped to [1, n]. A relative
// slack of 1e-9 absorbs binary representation error in `fraction`, so
// 0.05 * 100 yields rank 5 rather than 6.
std::size_t nearest_rank(std::size_t n, double fraction);

// Nearest-rank quantile of unsorted values. fraction in [0, 1].
double nearest_rank_quantile(std::span<const double> values, double fraction);

} // namespace oodkit
