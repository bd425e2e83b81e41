#include "oodkit/harness/metrics.hpp"

#include "oodkit/error.hpp"
#include "oodkit/quantile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace oodkit::harness {

namespace {

void check_scores(std::span<const double> id, std::span<const double> ood, const char* who) {
    if (id.empty() || ood.empty()) {
        throw ValidationError(std::string(who) + ": score vectors must be non-empty");
    }
    for (auto s : {id, ood}) {
        for (double v : s) {
            if (std::isnan(v)) throw ValidationError(std::string(who) + ": NaN score");
        }
    }
}

} // namespace

double tpr_threshold(std::span<const double> id_scores, double tpr) {
    if (id_scores.empty()) {
        throw ValidationError("tpr_threshold: empty ID scores");
    }
    if (!(tpr > 0.0 && tpr <= 1.0)) {
        throw ValidationError("tpr_threshold: tpr must lie in (0, 1]");
    }
    return nearest_rank_quantile(id_scores, 1.0 - tpr);
}

double fpr_at_tpr(std::span<const double> id_scores, std::span<const double> ood_scores, double tpr) {
    check_scores(id_scores, ood_scores, "fpr_at_tpr");
    const double t = tpr_threshold(id_scores, tpr);
    const auto hits = std::count_if(ood_scores.begin(), ood_scores.end(), [t](double s) { return s >= t; });
    return static_cast<double>(hits) / static_cast<double>(ood_scores.size());
}

double auroc(std::span<const double> id_scores, std::span<const double> ood_scores) {
    check_scores(id_scores, ood_scores, "auroc");
    std::vector<double> id(id_scores.begin(), id_scores.end());
    std::vector<double> ood(ood_scores.begin(), ood_scores.end());
    std::sort(id.begin(), id.end());
    std::sort(ood.begin(), ood.end());
    // Twice the Mann-Whitney U: 2 * #greater + #ties.
    std::uint64_t doubled = 0;
    std::size_t below = 0; // ood values strictly less than current id value
    std::size_t upto = 0;  // ood values <= current id value
    for (double v : id) {
        while (below < ood.size() && ood[below] < v) ++below;
        upto = std::max(upto, below);
        while (upto < ood.size() && ood[upto] <= v) ++upto;
        doubled += 2 * below + (upto - below);
    }
    const double pairs = static_cast<double>(id.size()) * static_cast<double>(ood.size());
    return static_cast<double>(doubled) / (2.0 * pairs);
}

std::vector<HistogramBin> score_histogram(std::span<const double> id_scores, std::span<const double> ood_scores,
                                          std::size_t bins) {
    check_scores(id_scores, ood_scores, "score_histogram");
    if (bins == 0) {
        throw ValidationError("score_histogram: need at least one bin");
    }
    double lo = id_scores[0];
    double hi = id_scores[0];
    for (auto s : {id_scores, ood_scores}) {
        for (double v : s) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (hi == lo) hi = lo + 1.0;
    const double width = (hi - lo) / static_cast<double>(bins);
    std::vector<HistogramBin> out(bins);
    for (std::size_t b = 0; b < bins; ++b) {
        out[b].lo = lo + width * static_cast<double>(b);
        out[b].hi = b + 1 == bins ? hi : lo + width * static_cast<double>(b + 1);
    }
    auto bin_of = [&](double v) {
        const auto b = static_cast<std::size_t>((v - lo) / width);
        return std::min(b, bins - 1);
    };
    for (double v : id_scores) ++out[bin_of(v)].id_count;
    for (double v : ood_scores) ++out[bin_of(v)].ood_count;
    return out;
}

} // namespace oodkit::harness
