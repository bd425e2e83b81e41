#include "oodkit/info/discrete_joint.hpp"

#include "oodkit/error.hpp"
#include "oodkit/info/measures.hpp"

#include <cmath>
#include <set>
#include <string>

namespace oodkit::info {

DiscreteJoint::DiscreteJoint(std::size_t domain_size, std::size_t feature_size, std::vector<double> pmf,
                             std::vector<int> class_labels, std::vector<int> domain_labels)
    : domain_size_(domain_size),
      feature_size_(feature_size),
      pmf_(std::move(pmf)),
      class_labels_(std::move(class_labels)),
      domain_labels_(std::move(domain_labels)) {
    if (domain_size_ == 0 || feature_size_ == 0) {
        throw ValidationError("DiscreteJoint: alphabets must be non-empty");
    }
    const std::size_t cells = domain_size_ * feature_size_;
    if (pmf_.size() != cells || class_labels_.size() != cells) {
        throw ValidationError("DiscreteJoint: pmf and class labels need " + std::to_string(cells) + " cells");
    }
    if (domain_labels_.size() != domain_size_) {
        throw ValidationError("DiscreteJoint: need one domain label per domain-feature value");
    }
    double total = 0.0;
    for (double p : pmf_) {
        if (!std::isfinite(p) || p < 0.0) {
            throw ValidationError("DiscreteJoint: pmf entries must be finite and non-negative");
        }
        total += p;
    }
    if (std::abs(total - 1.0) > kNormalizationTolerance) {
        throw ValidationError("DiscreteJoint: pmf sums to " + std::to_string(total) + ", expected 1");
    }
    for (std::size_t d = 0; d < domain_size_; ++d) {
        for (std::size_t f = 0; f < feature_size_; ++f) {
            const std::size_t cell = d * feature_size_ + f;
            if (pmf_[cell] == 0.0) {
                continue;
            }
            if (class_labels_[cell] < 0 || domain_labels_[d] < 0) {
                throw ValidationError("DiscreteJoint: labeling functions must be total over the support");
            }
            support_.push_back({d, f, pmf_[cell], class_labels_[cell], domain_labels_[d]});
        }
    }
}

DiscreteJoint DiscreteJoint::product(std::span<const double> p_domain, std::span<const double> p_feature,
                                     std::span<const int> labels_by_feature, std::vector<int> domain_labels) {
    if (labels_by_feature.size() != p_feature.size()) {
        throw ValidationError("DiscreteJoint::product: one class label per class-feature value required");
    }
    std::vector<double> pmf;
    std::vector<int> labels;
    pmf.reserve(p_domain.size() * p_feature.size());
    for (double pd : p_domain) {
        for (std::size_t f = 0; f < p_feature.size(); ++f) {
            pmf.push_back(pd * p_feature[f]);
            labels.push_back(labels_by_feature[f]);
        }
    }
    // Products of normalized marginals drift from 1 by a few ulps.
    double total = 0.0;
    for (double p : pmf) {
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw ValidationError("DiscreteJoint::product: marginals must each sum to 1");
    }
    for (double& p : pmf) {
        p /= total;
    }
    DiscreteJoint joint(p_domain.size(), p_feature.size(), std::move(pmf), std::move(labels),
                        std::move(domain_labels));
    joint.product_ = true;
    if (mutual_information(joint, vars::xd, vars::xy) > kNormalizationTolerance) {
        throw ValidationError("DiscreteJoint::product: marginals are not independent");
    }
    return joint;
}

std::size_t DiscreteJoint::label_count() const {
    std::set<int> labels;
    for (const auto& point : support_) {
        labels.insert(point.label);
    }
    return labels.size();
}

RepresentationMap RepresentationMap::from_function(const DiscreteJoint& joint,
                                                   const std::function<int(std::size_t, std::size_t)>& g) {
    RepresentationMap map;
    map.symbols.reserve(joint.support().size());
    for (const auto& point : joint.support()) {
        map.symbols.push_back(g(point.d, point.f));
    }
    map.validate(joint);
    return map;
}

RepresentationMap RepresentationMap::constant(const DiscreteJoint& joint) {
    return {std::vector<int>(joint.support().size(), 0)};
}

RepresentationMap RepresentationMap::label(const DiscreteJoint& joint) {
    return from_function(joint, [&](std::size_t d, std::size_t f) { return joint.class_label(d, f); });
}

RepresentationMap RepresentationMap::domain_feature(const DiscreteJoint& joint) {
    return from_function(joint, [](std::size_t d, std::size_t) { return static_cast<int>(d); });
}

RepresentationMap RepresentationMap::class_feature(const DiscreteJoint& joint) {
    return from_function(joint, [](std::size_t, std::size_t f) { return static_cast<int>(f); });
}

RepresentationMap RepresentationMap::identity(const DiscreteJoint& joint) {
    const auto width = joint.feature_size();
    return from_function(joint, [width](std::size_t d, std::size_t f) { return static_cast<int>(d * width + f); });
}

void RepresentationMap::validate(const DiscreteJoint& joint) const {
    if (symbols.size() != joint.support().size()) {
        throw ValidationError("RepresentationMap: expected " + std::to_string(joint.support().size()) +
                              " symbols, got " + std::to_string(symbols.size()));
    }
    for (int s : symbols) {
        if (s < 0) {
            throw ValidationError("RepresentationMap: symbols must be non-negative");
        }
    }
}

} // namespace oodkit::info
