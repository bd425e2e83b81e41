#pragma once

#include <cstddef>
#include <span>

namespace oodkit::harness {

enum class Alternative { greater, less, two_sided };

struct WilcoxonResult {
    std::size_t n = 0;       // non-zero differences
    double w_plus = 0.0;     // rank sum of positive differences
    double p_value = 1.0;
    bool exact = true;
};

inline constexpr std::size_t kWilcoxonExactLimit = 20;

// Wilcoxon signed-rank test. Zero differences are dropped; tied magnitudes
// get average ranks. For n <= 20 the p-value comes from the exact null
// distribution over all 2^n sign assignments (counted by dynamic
// programming on doubled ranks); above that a normal approximation with tie
// and continuity correction is used. Throws UndefinedTestError when every
// difference is zero.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> paired_diffs, Alternative alternative = Alternative::greater);

} // namespace oodkit::harness
