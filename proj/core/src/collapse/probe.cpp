#include "oodkit/collapse/probe.hpp"

#include "oodkit/error.hpp"
#include "oodkit/info/fano.hpp"
#include "oodkit/info/measures.hpp"
#include "oodkit/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace oodkit::collapse {

namespace {

constexpr std::uint64_t kProbeStream = 0x70726f6265; // "probe"

} // namespace

ProbeResult probe_domain_mi_bound(const MatrixF& representation, std::span<const std::int32_t> domains,
                                  const ProbeConfig& config) {
    const auto n = static_cast<std::size_t>(representation.rows());
    if (n != domains.size()) throw ValidationError("probe: one domain label per row required");
    if (!representation.allFinite()) throw ValidationError("probe: representation contains non-finite values");
    if (!(config.train_fraction > 0.0 && config.train_fraction < 1.0)) {
        throw ValidationError("probe: train_fraction must lie in (0, 1)");
    }
    std::map<std::int32_t, std::size_t> counts;
    for (auto d : domains) ++counts[d];
    if (counts.size() < 2) throw ValidationError("probe: need at least two domains");
    std::map<std::int32_t, std::int32_t> index;
    std::vector<double> pmf;
    for (const auto& [d, count] : counts) {
        index.emplace(d, static_cast<std::int32_t>(index.size()));
        pmf.push_back(static_cast<double>(count) / static_cast<double>(n));
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    CounterRng rng(config.seed, kProbeStream);
    rng.shuffle(std::span<std::size_t>(order));
    const auto n_train = static_cast<std::size_t>(std::floor(config.train_fraction * static_cast<double>(n)));
    if (n_train < 2 || n_train >= n) throw ValidationError("probe: too few rows for a train/held-out split");

    const auto dim = representation.cols();
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
    for (std::size_t i = 0; i < n_train; ++i) mean += representation.row(static_cast<Eigen::Index>(order[i])).cast<double>().transpose();
    mean /= static_cast<double>(n_train);
    Eigen::VectorXd var = Eigen::VectorXd::Zero(dim);
    for (std::size_t i = 0; i < n_train; ++i) {
        var += (representation.row(static_cast<Eigen::Index>(order[i])).cast<double>().transpose() - mean).array().square().matrix();
    }
    const Eigen::VectorXd scale = (var / static_cast<double>(n_train)).cwiseSqrt().array() + 1e-9;

    auto standardized = [&](std::size_t from, std::size_t to, std::vector<std::int32_t>& labels) {
        MatrixF out(static_cast<Eigen::Index>(to - from), dim);
        for (std::size_t i = from; i < to; ++i) {
            const auto src = static_cast<Eigen::Index>(order[i]);
            out.row(static_cast<Eigen::Index>(i - from)) =
                ((representation.row(src).cast<double>().transpose() - mean).array() / scale.array()).cast<float>().transpose();
            labels.push_back(index.at(domains[order[i]]));
        }
        return out;
    };
    std::vector<std::int32_t> train_labels;
    std::vector<std::int32_t> test_labels;
    const auto x_train = standardized(0, n_train, train_labels);
    const auto x_test = standardized(n_train, n, test_labels);
    const auto probe = train_linear(x_train, train_labels, counts.size(), config.trainer);

    ProbeResult result;
    result.domains = counts.size();
    result.train_rows = n_train;
    result.heldout_rows = n - n_train;
    result.error_rate = 1.0 - probe.accuracy(x_test, test_labels);
    result.domain_entropy = info::entropy(pmf);
    const double chance = 1.0 - 1.0 / static_cast<double>(result.domains);
    result.bound = info::mi_lower_bound_from_error(std::min(result.error_rate, chance), result.domains,
                                                   result.domain_entropy);
    return result;
}

} // namespace oodkit::collapse
