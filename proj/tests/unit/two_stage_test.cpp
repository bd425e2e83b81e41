#include <oodkit/error.hpp>
#include <oodkit/harness/metrics.hpp>
#include <oodkit/rng.hpp>
#include <oodkit/two_stage.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

using namespace oodkit;

namespace {

FeatureSet column(std::vector<float> values) {
    FeatureSet s;
    s.features = Eigen::Map<MatrixF>(values.data(), static_cast<Eigen::Index>(values.size()), 1);
    return s;
}

FeatureSet plane(const std::vector<std::pair<float, float>>& points) {
    FeatureSet s;
    s.features.resize(static_cast<Eigen::Index>(points.size()), 2);
    for (std::size_t i = 0; i < points.size(); ++i) {
        s.features(static_cast<Eigen::Index>(i), 0) = points[i].first;
        s.features(static_cast<Eigen::Index>(i), 1) = points[i].second;
    }
    return s;
}

// Pretrained train: 0, 0.01, ..., 0.99. Supervised train: a grid near the origin.
struct Fixture {
    FeatureSet pre_train;
    FeatureSet sup_train;
    Fixture() {
        std::vector<float> v(100);
        for (int i = 0; i < 100; ++i) v[static_cast<std::size_t>(i)] = static_cast<float>(i) / 100.0f;
        pre_train = column(v);
        std::vector<std::pair<float, float>> g;
        for (int i = 0; i < 10; ++i) g.emplace_back(static_cast<float>(i) * 0.1f, 0.0f);
        sup_train = plane(g);
    }
    TwoStageDetector detector(double threshold) const {
        auto filter = DomainFilter::with_threshold(pre_train, {0.99, 1, false}, threshold);
        return TwoStageDetector(std::move(filter), fit_knn(sup_train, 1, false), sup_train);
    }
};

} // namespace

TEST(DomainThreshold, NearestRank) {
    std::vector<double> d(1000);
    std::iota(d.begin(), d.end(), 1.0);
    std::reverse(d.begin(), d.end());
    EXPECT_EQ(calibrate_domain_threshold(d, 0.99), 990.0);
    EXPECT_EQ(calibrate_domain_threshold(d, 1.0), 1000.0);
}

TEST(DomainThreshold, Errors) {
    EXPECT_THROW(calibrate_domain_threshold({}, 0.99), ValidationError);
    const std::vector<double> few(5, 1.0);
    EXPECT_THROW(calibrate_domain_threshold(few, 0.99), ValidationError);
    const std::vector<double> ok(20, 1.0);
    EXPECT_THROW(calibrate_domain_threshold(ok, 0.0), ValidationError);
    EXPECT_THROW(calibrate_domain_threshold(ok, 1.5), ValidationError);
    auto bad = ok;
    bad[3] = -1.0;
    EXPECT_THROW(calibrate_domain_threshold(bad, 0.99), ValidationError);
}

TEST(DomainFilter, FullPercentileFlagsNoCalibrationRow) {
    CounterRng rng(3, 0);
    FeatureSet train;
    train.features.resize(300, 4);
    for (Eigen::Index i = 0; i < train.features.size(); ++i) train.features.data()[i] = static_cast<float>(rng.normal());
    const auto filter = DomainFilter::calibrate(train, {1.0, 10, true});
    for (double d : filter.calibration_distances()) EXPECT_LE(d, filter.threshold());
    EXPECT_EQ(filter.threshold(), *std::max_element(filter.calibration_distances().begin(),
                                                    filter.calibration_distances().end()));
    EXPECT_THROW(DomainFilter::calibrate(train, {0.99, 300, true}), ValidationError);
}

TEST(TwoStage, PassThroughBelowThreshold) {
    const Fixture fx;
    const auto det = fx.detector(0.05);
    const double pre[] = {0.5};
    const double sup[] = {0.33, 0.4};
    EXPECT_EQ(det.score(pre, sup), det.second_stage().score(sup));
}

TEST(TwoStage, FilteredBelowFloorAndDecreasing) {
    const Fixture fx;
    const auto det = fx.detector(0.05);
    const double sup[] = {0.0, 0.0};
    double previous = det.score_floor();
    for (double x : {1.2, 1.5, 3.0, 10.0}) {
        const double pre[] = {x};
        const double s = det.score(pre, sup);
        EXPECT_LT(s, previous);
        previous = s;
    }
}

TEST(TwoStage, MixedBatchCrossPairs) {
    const Fixture fx;
    const auto det = fx.detector(0.05);
    // Unfiltered rows carry poor second-stage scores, filtered rows perfect ones.
    const auto pre = column({0.10f, 0.20f, 0.30f, 0.40f, 0.50f, 2.0f, 3.0f, 5.0f, 8.0f, 40.0f});
    const auto sup = plane({{0, 50}, {0, 80}, {9, 120}, {3, 60}, {0, 300},
                            {0.1f, 0}, {0.2f, 0}, {0.3f, 0}, {0.4f, 0}, {0.5f, 0}});
    const auto scores = det.score_batch(pre, sup);
    const auto flags = det.filter_flags(pre);
    int pairs = 0;
    for (std::size_t i = 0; i < 10; ++i) {
        for (std::size_t j = 0; j < 10; ++j) {
            if (!flags[i] && flags[j]) {
                EXPECT_GT(scores[i], scores[j]) << i << " vs " << j;
                ++pairs;
            }
        }
    }
    EXPECT_EQ(pairs, 25);
    for (std::size_t i = 0; i < 5; ++i) {
        const double s = det.second_stage().score(to_double(sup.feature_row(i)));
        EXPECT_EQ(scores[i], s);
    }
}

TEST(TwoStage, SharedFloorAcrossBatches) {
    const Fixture fx;
    const auto det = fx.detector(0.05);
    const auto pre_a = column({0.1f, 0.2f});
    const auto sup_a = plane({{0, 500}, {0, 1}});
    const auto pre_b = column({7.0f});
    const auto sup_b = plane({{0, 0}});
    const std::vector<TwoStageDetector::BatchView> views{{&pre_a, &sup_a}, {&pre_b, &sup_b}};
    const auto scores = det.score_batches(views);
    EXPECT_LT(scores[1][0], scores[0][0]);
    EXPECT_LT(scores[1][0], scores[0][1]);
}

TEST(TwoStage, Decide) {
    const Fixture fx;
    auto det = fx.detector(0.05);
    const double near[] = {0.5};
    const double far[] = {100.0};
    const double good[] = {0.3, 0.0};
    EXPECT_THROW(det.decide(near, good), ConfigError);
    const double tau = det.second_stage().score(good);
    det.set_tau(tau);
    EXPECT_FALSE(det.decide(near, good));
    EXPECT_TRUE(det.decide(far, good));
    const double bad[] = {0.3, 2.0};
    EXPECT_TRUE(det.decide(near, bad));
    det.set_tau(tau - 1.0);
    EXPECT_FALSE(det.decide(near, good));
}

TEST(TwoStage, DimensionErrorsNameTheSpace) {
    const Fixture fx;
    const auto det = fx.detector(0.05);
    const double pre_bad[] = {0.1, 0.2};
    const double pre[] = {0.1};
    const double sup[] = {0.0, 0.0};
    const double sup_bad[] = {0.0};
    try {
        det.score(pre_bad, sup);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("pretrained"), std::string::npos);
    }
    try {
        det.score(pre, sup_bad);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("supervised"), std::string::npos);
    }
}

namespace {

// Brute-force leave-one-out k-th neighbour distance, independent of KnnIndex.
std::vector<double> loo_kth(const MatrixF& x, std::size_t k) {
    std::vector<double> out;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        std::vector<double> d;
        for (Eigen::Index j = 0; j < x.rows(); ++j) {
            if (i == j) continue;
            double acc = 0.0;
            for (Eigen::Index c = 0; c < x.cols(); ++c) {
                const double diff = static_cast<double>(x(j, c)) - static_cast<double>(x(i, c));
                acc += diff * diff;
            }
            d.push_back(std::sqrt(acc));
        }
        std::sort(d.begin(), d.end());
        out.push_back(d[k - 1]);
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

// 980 grid points plus 20 planted outliers far apart on a ring. At p = 0.98
// the threshold stops at the grid; at p = 0.99 it lands among the outliers
// and lets a nearby far set through.
TEST(TwoStage, PlantedOutliersLowerPercentileHelps) {
    std::vector<std::pair<float, float>> pts;
    for (int i = 0; i < 28; ++i) {
        for (int j = 0; j < 35; ++j) pts.emplace_back(0.1f * static_cast<float>(i), 0.1f * static_cast<float>(j));
    }
    for (int a = 0; a < 20; ++a) {
        const double angle = 2.0 * 3.14159265358979 * a / 20.0;
        pts.emplace_back(static_cast<float>(1.35 + 50.0 * std::cos(angle)), static_cast<float>(1.7 + 50.0 * std::sin(angle)));
    }
    const auto pre_train = plane(pts);

    std::vector<std::pair<float, float>> id_pts, far_pts;
    for (int i = 1; i < 26; ++i) id_pts.emplace_back(0.1f * static_cast<float>(i) + 0.05f, 1.55f);
    for (int i = 0; i < 25; ++i) far_pts.emplace_back(7.5f + 0.1f * static_cast<float>(i), 1.55f);
    const auto id_pre = plane(id_pts);
    const auto far_pre = plane(far_pts);

    std::vector<float> sup(1000);
    for (std::size_t i = 0; i < sup.size(); ++i) sup[i] = static_cast<float>(i % 50) / 50.0f;
    const auto sup_train = column(sup);
    std::vector<float> probe(25);
    for (std::size_t i = 0; i < probe.size(); ++i) probe[i] = static_cast<float>(i) / 25.0f;
    const auto id_sup = column(probe);
    const auto far_sup = column(probe);

    const auto sorted = loo_kth(pre_train.features, 5);
    const double far_reach = 7.5 - 2.7; // distance from the far set to the grid's edge

    double fpr[2];
    const double percentiles[2] = {0.98, 0.99};
    for (int v = 0; v < 2; ++v) {
        const double p = percentiles[v];
        auto filter = DomainFilter::calibrate(pre_train, {p, 5, false});
        const double expected = sorted[static_cast<std::size_t>(std::ceil(p * 1000.0)) - 1];
        EXPECT_NEAR(filter.threshold(), expected, 1e-12) << "p=" << p;
        const TwoStageDetector det(std::move(filter), fit_knn(sup_train, 1, false), sup_train);
        const TwoStageDetector::BatchView views[2] = {{&id_pre, &id_sup}, {&far_pre, &far_sup}};
        const auto scores = det.score_batches(views);
        fpr[v] = harness::fpr_at_tpr(scores[0], scores[1]);
    }
    EXPECT_LT(sorted[979], far_reach);
    EXPECT_GT(sorted[989], far_reach + 0.1 * 25);
    EXPECT_EQ(fpr[0], 0.0);
    EXPECT_EQ(fpr[1], 1.0);
}
