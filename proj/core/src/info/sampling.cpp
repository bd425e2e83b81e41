#include "oodkit/info/sampling.hpp"

#include "oodkit/error.hpp"

#include <numeric>
#include <utility>

namespace oodkit::info {

namespace {

std::pair<std::size_t, std::size_t> sample_alphabets(CounterRng& rng, const JointShape& shape) {
    if (shape.min_support > shape.max_support || shape.max_support < 2) {
        throw ValidationError("JointShape: need 2 <= max_support and min_support <= max_support");
    }
    std::vector<std::pair<std::size_t, std::size_t>> shapes;
    for (std::size_t nd = 1; nd <= shape.max_support; ++nd) {
        for (std::size_t nf = 2; nd * nf <= shape.max_support; ++nf) {
            if (nd * nf >= shape.min_support) {
                shapes.emplace_back(nd, nf);
            }
        }
    }
    if (shapes.empty()) {
        throw ValidationError("JointShape: no alphabet pair fits the support bounds");
    }
    return shapes[rng.below(shapes.size())];
}

std::vector<int> random_surjection(CounterRng& rng, std::size_t domain, std::size_t codomain) {
    std::vector<int> out(domain);
    std::iota(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(codomain), 0);
    for (std::size_t i = codomain; i < domain; ++i) {
        out[i] = static_cast<int>(rng.below(codomain));
    }
    rng.shuffle(std::span<int>(out));
    return out;
}

} // namespace

std::vector<double> sample_flat_dirichlet(CounterRng& rng, std::size_t n) {
    std::vector<double> w(n);
    double total = 0.0;
    for (auto& v : w) {
        v = rng.exponential();
        total += v;
    }
    for (auto& v : w) {
        v /= total;
    }
    return w;
}

DiscreteJoint sample_single_domain_joint(CounterRng& rng, const JointShape& shape) {
    const auto [nd, nf] = sample_alphabets(rng, shape);
    const auto p_domain = sample_flat_dirichlet(rng, nd);
    const auto p_feature = sample_flat_dirichlet(rng, nf);
    const std::size_t labels = 2 + static_cast<std::size_t>(rng.below(nf - 1));
    const auto f_y = random_surjection(rng, nf, labels);
    return DiscreteJoint::product(p_domain, p_feature, f_y, std::vector<int>(nd, 0));
}

DiscreteJoint sample_product_joint(CounterRng& rng, const JointShape& shape) {
    const auto [nd, nf] = sample_alphabets(rng, shape);
    const auto p_domain = sample_flat_dirichlet(rng, nd);
    const auto p_feature = sample_flat_dirichlet(rng, nf);
    std::vector<double> pmf;
    for (double pd : p_domain) {
        for (double pf : p_feature) {
            pmf.push_back(pd * pf);
        }
    }
    double total = std::accumulate(pmf.begin(), pmf.end(), 0.0);
    for (double& p : pmf) {
        p /= total;
    }
    const std::size_t cells = nd * nf;
    const std::size_t labels = 2 + static_cast<std::size_t>(rng.below(cells - 1));
    std::vector<int> domains(nd);
    for (auto& d : domains) {
        d = static_cast<int>(rng.below(2));
    }
    return DiscreteJoint(nd, nf, std::move(pmf), random_surjection(rng, cells, labels), std::move(domains));
}

RepresentationMap sample_map(CounterRng& rng, const DiscreteJoint& joint, std::size_t alphabet) {
    RepresentationMap map;
    for (std::size_t i = 0; i < joint.support().size(); ++i) {
        map.symbols.push_back(static_cast<int>(rng.below(alphabet)));
    }
    return map;
}

RepresentationMap sample_class_feature_map(CounterRng& rng, const DiscreteJoint& joint, std::size_t alphabet) {
    std::vector<int> by_feature(joint.feature_size());
    for (auto& s : by_feature) {
        s = static_cast<int>(rng.below(alphabet));
    }
    return RepresentationMap::from_function(joint, [&](std::size_t, std::size_t f) { return by_feature[f]; });
}

} // namespace oodkit::info
