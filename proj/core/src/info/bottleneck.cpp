#include "oodkit/info/bottleneck.hpp"

#include "oodkit/error.hpp"
#include "oodkit/info/measures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace oodkit::info {

namespace {

constexpr double kLossTieTolerance = 1e-10;
constexpr double kIndependenceTolerance = 1e-12;

double xlogx(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }

void check_enumeration_preconditions(const DiscreteJoint& joint) {
    if (mutual_information(joint, vars::xd, vars::xy) > kIndependenceTolerance) {
        throw ValidationError("enumerate_minimizers: x_d and x_y must be independent");
    }
    std::map<std::size_t, int> label_of_feature;
    const int domain = joint.support().front().domain;
    for (const auto& pt : joint.support()) {
        const auto [it, inserted] = label_of_feature.emplace(pt.f, pt.label);
        if (!inserted && it->second != pt.label) {
            throw ValidationError("enumerate_minimizers: class label must be a function of x_y alone");
        }
        if (pt.domain != domain) {
            throw ValidationError("enumerate_minimizers: training support must carry a single domain label");
        }
    }
}

// Restricted-growth-string walk over set partitions with at most
// `max_blocks` blocks.
class PartitionSearch {
public:
    PartitionSearch(const DiscreteJoint& joint, double beta, std::size_t max_blocks)
        : support_(joint.support()), beta_(beta), max_blocks_(max_blocks) {
        std::map<int, std::size_t> dense;
        for (const auto& pt : support_) {
            dense.emplace(pt.label, dense.size());
        }
        labels_ = dense.size();
        label_index_.reserve(support_.size());
        std::vector<double> label_mass(labels_, 0.0);
        for (const auto& pt : support_) {
            label_index_.push_back(dense.at(pt.label));
            label_mass[label_index_.back()] += pt.p;
        }
        for (double p : label_mass) {
            label_entropy_ -= xlogx(p);
        }
        assignment_.assign(support_.size(), 0);
        block_mass_.assign(max_blocks_, 0.0);
        block_label_mass_.assign(max_blocks_ * labels_, 0.0);
    }

    void run() { visit(0, 0); }

    std::size_t examined = 0;
    std::size_t sufficient = 0;
    double best = 0.0;
    double min_relevance = 0.0;
    double max_relevance = 0.0;
    struct Candidate {
        std::vector<int> blocks;
        std::size_t block_count;
        double loss;
    };
    std::vector<Candidate> candidates;

private:
    void visit(std::size_t i, std::size_t used) {
        if (i == support_.size()) {
            evaluate(used);
            return;
        }
        const std::size_t limit = std::min(used + 1, max_blocks_);
        for (std::size_t b = 0; b < limit; ++b) {
            assignment_[i] = static_cast<int>(b);
            visit(i + 1, b == used ? used + 1 : used);
        }
    }

    void evaluate(std::size_t used) {
        ++examined;
        std::fill(block_mass_.begin(), block_mass_.end(), 0.0);
        std::fill(block_label_mass_.begin(), block_label_mass_.end(), 0.0);
        for (std::size_t i = 0; i < support_.size(); ++i) {
            const auto b = static_cast<std::size_t>(assignment_[i]);
            block_mass_[b] += support_[i].p;
            block_label_mass_[b * labels_ + label_index_[i]] += support_[i].p;
        }
        double h_z = 0.0;
        double h_zy = 0.0;
        for (std::size_t b = 0; b < used; ++b) {
            h_z -= xlogx(block_mass_[b]);
            for (std::size_t l = 0; l < labels_; ++l) {
                h_zy -= xlogx(block_label_mass_[b * labels_ + l]);
            }
        }
        // y and z are both functions of x, so I(x; y | z) = H(y | z).
        const double residual = h_zy - h_z;
        if (residual > kSufficiencyTolerance) {
            return;
        }
        const double relevance = label_entropy_ - residual;
        const double loss = h_z - beta_ * relevance;
        if (sufficient == 0) {
            best = loss;
            min_relevance = max_relevance = relevance;
        }
        ++sufficient;
        min_relevance = std::min(min_relevance, relevance);
        max_relevance = std::max(max_relevance, relevance);
        if (loss < best - kLossTieTolerance) {
            best = loss;
            std::erase_if(candidates, [&](const Candidate& c) { return c.loss > best + kLossTieTolerance; });
        }
        if (loss <= best + kLossTieTolerance) {
            best = std::min(best, loss);
            candidates.push_back({assignment_, used, loss});
        }
    }

    const std::vector<DiscreteJoint::Point>& support_;
    double beta_;
    std::size_t max_blocks_;
    std::size_t labels_ = 0;
    double label_entropy_ = 0.0;
    std::vector<std::size_t> label_index_;
    std::vector<int> assignment_;
    std::vector<double> block_mass_;
    std::vector<double> block_label_mass_;
};

// Calls emit(labeling) for every injective map {0..blocks-1} -> {0..alphabet-1}.
template <typename Emit>
void for_each_injection(std::size_t blocks, std::size_t alphabet, Emit&& emit) {
    std::vector<int> image(blocks, 0);
    std::vector<bool> taken(alphabet, false);
    auto rec = [&](auto&& self, std::size_t b) -> void {
        if (b == blocks) {
            emit(image);
            return;
        }
        for (std::size_t s = 0; s < alphabet; ++s) {
            if (taken[s]) continue;
            taken[s] = true;
            image[b] = static_cast<int>(s);
            self(self, b + 1);
            taken[s] = false;
        }
    };
    rec(rec, 0);
}

} // namespace

void IbLossSpec::validate() const {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw ValidationError("IbLossSpec: beta must be a positive finite number");
    }
}

double ib_loss(const DiscreteJoint& joint, const RepresentationMap& z, const IbLossSpec& spec) {
    spec.validate();
    z.validate(joint);
    const double compression = mutual_information(joint, vars::x, vars::z, &z);
    const double relevance = mutual_information(joint, vars::z, vars::y, &z);
    const double h_z = joint_entropy(joint, vars::z, &z);
    if (std::abs(compression - h_z) > 1e-12) {
        throw std::logic_error("ib_loss: I(x; z) differs from H(z) for a deterministic map");
    }
    return compression - spec.beta * relevance;
}

bool is_sufficient(const DiscreteJoint& joint, const RepresentationMap& z) {
    z.validate(joint);
    const bool sufficient = conditional_mi(joint, vars::x, vars::y, vars::z, &z) <= kSufficiencyTolerance;
    if (sufficient) {
        const double gap = mutual_information(joint, vars::y, vars::z, &z) - mutual_information(joint, vars::x, vars::y);
        if (std::abs(gap) > kSufficiencyTolerance) {
            throw std::logic_error("is_sufficient: sufficient map loses label information");
        }
    }
    return sufficient;
}

MinimizerSet enumerate_minimizers(const DiscreteJoint& joint, const IbLossSpec& spec, std::size_t z_alphabet_size) {
    spec.validate();
    const std::size_t n = joint.support().size();
    if (n > kMaxEnumerationSupport) {
        throw ValidationError("enumerate_minimizers: support of " + std::to_string(n) + " exceeds " +
                              std::to_string(kMaxEnumerationSupport));
    }
    if (z_alphabet_size == 0 || z_alphabet_size > n) {
        throw ValidationError("enumerate_minimizers: z alphabet size must lie in [1, |support|]");
    }
    check_enumeration_preconditions(joint);

    PartitionSearch search(joint, spec.beta, z_alphabet_size);
    search.run();
    if (search.sufficient == 0) {
        throw InsufficientAlphabetError("enumerate_minimizers: no sufficient map with " +
                                        std::to_string(z_alphabet_size) + " symbols (need at least " +
                                        std::to_string(joint.label_count()) + ")");
    }

    MinimizerSet result;
    result.min_loss = search.best;
    result.partitions_examined = search.examined;
    result.sufficient_partitions = search.sufficient;
    result.beta_independent = search.max_relevance - search.min_relevance <= kSufficiencyTolerance;
    for (const auto& candidate : search.candidates) {
        if (candidate.loss > search.best + kLossTieTolerance) {
            continue;
        }
        ++result.minimal_partitions;
        RepresentationMap canonical{candidate.blocks};
        const double loss = ib_loss(joint, canonical, spec);
        const double leak = mutual_information(joint, vars::xd, vars::z, &canonical);
        result.max_domain_information = std::max(result.max_domain_information, leak);
        for_each_injection(candidate.block_count, z_alphabet_size, [&](const std::vector<int>& image) {
            RepresentationMap map;
            map.symbols.reserve(n);
            for (int block : candidate.blocks) {
                map.symbols.push_back(image[static_cast<std::size_t>(block)]);
            }
            result.minimizers.push_back({std::move(map), loss, leak});
        });
    }
    return result;
}

} // namespace oodkit::info
