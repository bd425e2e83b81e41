#include <oodkit/error.hpp>
#include <oodkit/info/bottleneck.hpp>
#include <oodkit/info/measures.hpp>
#include <oodkit/info/sampling.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

using namespace oodkit;
using namespace oodkit::info;

namespace {

// Brute-force oracle over every map support -> {0..A-1}, computed from the
// table directly without the library's information routines.
struct OracleMap {
    std::vector<int> symbols;
    double loss;
    double domain_information;
};

double plugin_entropy(const std::map<std::vector<long long>, double>& mass) {
    double h = 0.0;
    for (const auto& [k, m] : mass) {
        if (m > 0.0) h -= m * std::log(m);
    }
    return h;
}

std::vector<OracleMap> brute_force_minimizers(const DiscreteJoint& j, double beta, std::size_t alphabet) {
    const auto& support = j.support();
    const std::size_t n = support.size();
    std::vector<int> sym(n, 0);
    std::vector<OracleMap> sufficient;
    while (true) {
        std::map<std::vector<long long>, double> pz, pzy, py, pdz, pd;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& p = support[i];
            pz[{sym[i]}] += p.p;
            pzy[{sym[i], p.label}] += p.p;
            py[{p.label}] += p.p;
            pdz[{static_cast<long long>(p.d), sym[i]}] += p.p;
            pd[{static_cast<long long>(p.d)}] += p.p;
        }
        const double hz = plugin_entropy(pz);
        const double hy = plugin_entropy(py);
        const double hzy = plugin_entropy(pzy);
        const double h_y_given_z = hzy - hz;
        if (h_y_given_z <= 1e-9) {
            const double izy = hz + hy - hzy;
            const double idz = plugin_entropy(pd) + hz - plugin_entropy(pdz);
            sufficient.push_back({sym, hz - beta * izy, std::max(0.0, idz)});
        }
        std::size_t k = 0;
        while (k < n && ++sym[k] == static_cast<int>(alphabet)) sym[k++] = 0;
        if (k == n) break;
    }
    if (sufficient.empty()) return {};
    double best = sufficient.front().loss;
    for (const auto& m : sufficient) best = std::min(best, m.loss);
    std::vector<OracleMap> out;
    for (const auto& m : sufficient) {
        if (m.loss <= best + 1e-10) out.push_back(m);
    }
    return out;
}

std::set<std::vector<int>> as_set(const MinimizerSet& s) {
    std::set<std::vector<int>> out;
    for (const auto& m : s.minimizers) out.insert(m.map.symbols);
    return out;
}

DiscreteJoint two_independent_bits() {
    const double half[] = {0.5, 0.5};
    const int labels[] = {0, 1};
    return DiscreteJoint::product(half, half, labels, {0, 0});
}

} // namespace

TEST(IbLoss, ConstantMapIsZero) {
    const auto j = two_independent_bits();
    EXPECT_NEAR(ib_loss(j, RepresentationMap::constant(j), {3.0}), 0.0, 1e-15);
}

TEST(IbLoss, IdentityMap) {
    const auto j = two_independent_bits();
    const double beta = 1.5;
    const double expected = std::log(4.0) - beta * mutual_information(j, vars::x, vars::y);
    EXPECT_NEAR(ib_loss(j, RepresentationMap::identity(j), {beta}), expected, 1e-15);
}

TEST(IbLoss, ClassFeatureOnUniformGrid) {
    const auto j = two_independent_bits();
    EXPECT_NEAR(ib_loss(j, RepresentationMap::class_feature(j), {2.0}), -0.69314718055994530942, 1e-15);
}

TEST(IbLoss, RejectsNonPositiveBeta) {
    const auto j = two_independent_bits();
    EXPECT_THROW(ib_loss(j, RepresentationMap::constant(j), {0.0}), ValidationError);
}

TEST(Sufficiency, LabelImageIsSufficient) {
    const auto j = two_independent_bits();
    EXPECT_TRUE(is_sufficient(j, RepresentationMap::label(j)));
}

TEST(Sufficiency, ConstantIsNot) {
    const auto j = two_independent_bits();
    EXPECT_FALSE(is_sufficient(j, RepresentationMap::constant(j)));
}

TEST(Sufficiency, DomainFeatureCarriesNoLabelInformation) {
    const double pd[] = {0.5, 0.5};
    const double pf[] = {0.5, 0.5};
    const int labels[] = {0, 1};
    const auto j = DiscreteJoint::product(pd, pf, labels, {0, 1});
    const auto z = RepresentationMap::domain_feature(j);
    EXPECT_FALSE(is_sufficient(j, z));
    // Table oracle: p(z, y) = p(z) p(y) = 1/4 for all four pairs.
    EXPECT_NEAR(mutual_information(j, vars::y, vars::z, &z), 0.0, 1e-15);
}

TEST(Enumerate, TwoBitsMinimizersAreRelabelingsOfClassFeature) {
    const auto j = two_independent_bits();
    const auto result = enumerate_minimizers(j, {10.0}, 4);
    // 4 * 3 injective labelings of the two x_y values, constant in x_d.
    ASSERT_EQ(result.minimizers.size(), 12u);
    for (const auto& m : result.minimizers) {
        const auto& s = m.map.symbols;
        EXPECT_EQ(s[0], s[2]); // (d=0,f=0) and (d=1,f=0)
        EXPECT_EQ(s[1], s[3]);
        EXPECT_NE(s[0], s[1]);
        EXPECT_LE(m.domain_information, 1e-9);
    }
    std::set<std::vector<int>> oracle;
    for (const auto& m : brute_force_minimizers(j, 10.0, 4)) oracle.insert(m.symbols);
    EXPECT_EQ(as_set(result), oracle);
}

TEST(Enumerate, ZeroEntropyDomainIsVacuous) {
    const double pd[] = {1.0};
    const double pf[] = {0.2, 0.3, 0.5};
    const int labels[] = {0, 1, 1};
    const auto j = DiscreteJoint::product(pd, pf, labels, {0});
    const auto result = enumerate_minimizers(j, {1.0}, 3);
    for (const auto& m : result.minimizers) EXPECT_EQ(m.domain_information, 0.0);
}

TEST(Enumerate, InsufficientAlphabetThrows) {
    const double pd[] = {1.0};
    const double pf[] = {0.2, 0.3, 0.5};
    const int labels[] = {0, 1, 2};
    const auto j = DiscreteJoint::product(pd, pf, labels, {0});
    EXPECT_THROW(enumerate_minimizers(j, {1.0}, 2), InsufficientAlphabetError);
}

TEST(Enumerate, MatchesBruteForceOnRandomJoints) {
    CounterRng rng(2024, 9);
    int compared = 0;
    while (compared < 40) {
        const auto j = sample_single_domain_joint(rng, {2, 6});
        const std::size_t n = j.support().size();
        const std::size_t alphabet = std::min<std::size_t>(n, 4);
        if (j.label_count() > alphabet) continue;
        const double beta = std::vector<double>{0.5, 1.0, 2.0, 10.0}[rng.below(4)];
        const auto result = enumerate_minimizers(j, {beta}, alphabet);
        const auto oracle = brute_force_minimizers(j, beta, alphabet);
        std::set<std::vector<int>> expected;
        for (const auto& m : oracle) expected.insert(m.symbols);
        EXPECT_EQ(as_set(result), expected);
        for (const auto& m : oracle) EXPECT_NEAR(m.loss, result.min_loss, 1e-10);
        ++compared;
    }
}

TEST(Enumerate, CollapsePropertyOnRandomSingleDomainJoints) {
    CounterRng rng(77, 3);
    for (int i = 0; i < 100; ++i) {
        const auto j = sample_single_domain_joint(rng, {2, 9});
        const std::size_t n = j.support().size();
        if (j.label_count() > n) continue;
        const std::size_t alphabet = j.label_count() + rng.below(n - j.label_count() + 1);
        const auto result = enumerate_minimizers(j, {2.0}, alphabet);
        EXPECT_LE(result.max_domain_information, 1e-9);
        EXPECT_TRUE(result.beta_independent);
        for (const auto& m : result.minimizers) EXPECT_TRUE(is_sufficient(j, m.map));
    }
}

TEST(Enumerate, RejectsOversizedSupport) {
    std::vector<double> pf(13, 1.0 / 13.0);
    std::vector<int> labels(13);
    for (int i = 0; i < 13; ++i) labels[static_cast<std::size_t>(i)] = i % 2;
    const double pd[] = {1.0};
    const auto j = DiscreteJoint::product(pd, pf, labels, {0});
    EXPECT_THROW(enumerate_minimizers(j, {1.0}, 2), ValidationError);
}

TEST(InfoProperties, SufficiencyEquivalence) {
    CounterRng rng(8, 8);
    for (int i = 0; i < 300; ++i) {
        const auto j = sample_product_joint(rng);
        const auto z = sample_map(rng, j, 1 + rng.below(5));
        const bool equal = std::abs(mutual_information(j, vars::y, vars::z, &z) - mutual_information(j, vars::x, vars::y)) <= 1e-9;
        EXPECT_EQ(is_sufficient(j, z), equal);
    }
}
