#include "oodkit/harness/wilcoxon.hpp"

#include "oodkit/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace oodkit::harness {

namespace {

double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

} // namespace

WilcoxonResult wilcoxon_signed_rank(std::span<const double> paired_diffs, Alternative alternative) {
    std::vector<double> diffs;
    for (double d : paired_diffs) {
        if (std::isnan(d)) throw ValidationError("wilcoxon: NaN difference");
        if (d != 0.0) diffs.push_back(d);
    }
    if (diffs.empty()) {
        throw UndefinedTestError("wilcoxon: all differences are zero");
    }
    const std::size_t n = diffs.size();

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return std::abs(diffs[a]) < std::abs(diffs[b]); });

    // Doubled average ranks stay integral under ties.
    std::vector<std::uint64_t> doubled_rank(n);
    std::vector<std::size_t> tie_sizes;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && std::abs(diffs[order[j + 1]]) == std::abs(diffs[order[i]])) ++j;
        const std::uint64_t rank_sum_doubled = (i + 1) + (j + 1); // 2 * average of ranks i+1..j+1
        for (std::size_t m = i; m <= j; ++m) doubled_rank[order[m]] = rank_sum_doubled;
        tie_sizes.push_back(j - i + 1);
        i = j + 1;
    }

    std::uint64_t w_plus_doubled = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (diffs[i] > 0.0) w_plus_doubled += doubled_rank[i];
    }

    WilcoxonResult result;
    result.n = n;
    result.w_plus = static_cast<double>(w_plus_doubled) / 2.0;

    if (n <= kWilcoxonExactLimit) {
        const std::uint64_t total = std::accumulate(doubled_rank.begin(), doubled_rank.end(), std::uint64_t{0});
        std::vector<std::uint64_t> counts(total + 1, 0);
        counts[0] = 1;
        std::uint64_t reach = 0;
        for (auto r : doubled_rank) {
            for (std::uint64_t s = reach + 1; s-- > 0;) {
                if (counts[s] != 0) counts[s + r] += counts[s];
            }
            reach += r;
        }
        const double assignments = std::ldexp(1.0, static_cast<int>(n));
        std::uint64_t upper = 0;
        std::uint64_t lower = 0;
        for (std::uint64_t s = 0; s <= total; ++s) {
            if (s >= w_plus_doubled) upper += counts[s];
            if (s <= w_plus_doubled) lower += counts[s];
        }
        const double p_upper = static_cast<double>(upper) / assignments;
        const double p_lower = static_cast<double>(lower) / assignments;
        switch (alternative) {
        case Alternative::greater: result.p_value = p_upper; break;
        case Alternative::less: result.p_value = p_lower; break;
        case Alternative::two_sided: result.p_value = std::min(1.0, 2.0 * std::min(p_upper, p_lower)); break;
        }
        return result;
    }

    result.exact = false;
    const double nd = static_cast<double>(n);
    const double mean = nd * (nd + 1.0) / 4.0;
    double variance = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0;
    for (auto t : tie_sizes) {
        const double td = static_cast<double>(t);
        variance -= (td * td * td - td) / 48.0;
    }
    const double sd = std::sqrt(variance);
    const double z_upper = (result.w_plus - mean - 0.5) / sd;
    const double z_lower = (result.w_plus - mean + 0.5) / sd;
    const double p_upper = normal_upper_tail(z_upper);
    const double p_lower = 1.0 - normal_upper_tail(z_lower);
    switch (alternative) {
    case Alternative::greater: result.p_value = p_upper; break;
    case Alternative::less: result.p_value = p_lower; break;
    case Alternative::two_sided: result.p_value = std::min(1.0, 2.0 * std::min(p_upper, p_lower)); break;
    }
    return result;
}

} // namespace oodkit::harness
