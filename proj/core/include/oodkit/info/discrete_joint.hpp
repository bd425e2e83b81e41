#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace oodkit::info {

// Variables that can be read off a DiscreteJoint (plus an optional
// representation map). Combine with | to form joint variables.
struct Vars {
    std::uint8_t bits = 0;

    constexpr bool empty() const noexcept { return bits == 0; }
    constexpr bool has(Vars other) const noexcept { return (bits & other.bits) == other.bits; }
    friend constexpr Vars operator|(Vars a, Vars b) noexcept { return Vars{static_cast<std::uint8_t>(a.bits | b.bits)}; }
    friend constexpr bool operator==(Vars, Vars) = default;
};

namespace vars {
inline constexpr Vars xd{1};          // domain features
inline constexpr Vars xy{2};          // class features
inline constexpr Vars x = xd | xy;    // full input
inline constexpr Vars y{4};           // class label f_y(x_d, x_y)
inline constexpr Vars d{8};           // domain label f_d(x_d)
inline constexpr Vars z{16};          // representation symbol
} // namespace vars

// Exact finite joint distribution over (x_d, x_y) with deterministic class
// and domain labeling functions. Cells are indexed row-major as
// d * feature_size() + f.
class DiscreteJoint {
public:
    struct Point {
        std::size_t d;
        std::size_t f;
        double p;
        int label;
        int domain;
    };

    static constexpr double kNormalizationTolerance = 1e-12;

    // class_labels has one entry per cell (entries for zero-mass cells are
    // ignored), domain_labels one entry per domain-feature value.
    DiscreteJoint(std::size_t domain_size, std::size_t feature_size, std::vector<double> pmf,
                  std::vector<int> class_labels, std::vector<int> domain_labels);

    // Product of independent marginals. labels_by_feature gives f_y as a
    // function of x_y alone.
    static DiscreteJoint product(std::span<const double> p_domain, std::span<const double> p_feature,
                                 std::span<const int> labels_by_feature, std::vector<int> domain_labels);

    std::size_t domain_size() const noexcept { return domain_size_; }
    std::size_t feature_size() const noexcept { return feature_size_; }
    double prob(std::size_t d, std::size_t f) const { return pmf_.at(d * feature_size_ + f); }
    int class_label(std::size_t d, std::size_t f) const { return class_labels_.at(d * feature_size_ + f); }
    int domain_label(std::size_t d) const { return domain_labels_.at(d); }

    // Cells with positive mass, in row-major order.
    const std::vector<Point>& support() const noexcept { return support_; }
    bool constructed_as_product() const noexcept { return product_; }

    // Number of distinct class labels on the support.
    std::size_t label_count() const;

private:
    std::size_t domain_size_;
    std::size_t feature_size_;
    std::vector<double> pmf_;
    std::vector<int> class_labels_;
    std::vector<int> domain_labels_;
    std::vector<Point> support_;
    bool product_ = false;
};

// Deterministic representation z = g(x): one symbol per support point,
// parallel to DiscreteJoint::support().
struct RepresentationMap {
    std::vector<int> symbols;

    static RepresentationMap from_function(const DiscreteJoint& joint,
                                           const std::function<int(std::size_t d, std::size_t f)>& g);
    static RepresentationMap constant(const DiscreteJoint& joint);
    static RepresentationMap label(const DiscreteJoint& joint);
    static RepresentationMap domain_feature(const DiscreteJoint& joint);
    static RepresentationMap class_feature(const DiscreteJoint& joint);
    static RepresentationMap identity(const DiscreteJoint& joint);

    // Throws ValidationError unless the map covers the support with
    // non-negative symbols.
    void validate(const DiscreteJoint& joint) const;

    friend bool operator==(const RepresentationMap&, const RepresentationMap&) = default;
};

} // namespace oodkit::info
