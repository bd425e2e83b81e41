#include <oodkit/collapse/experiment.hpp>
#include <oodkit/collapse/linear_model.hpp>
#include <oodkit/collapse/probe.hpp>
#include <oodkit/collapse/synthetic.hpp>
#include <oodkit/error.hpp>
#include <oodkit/rng.hpp>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <array>
#include <cmath>
#include <numeric>

using namespace oodkit;
using namespace oodkit::collapse;

namespace {

SynthConfig small_config(std::uint64_t seed) {
    SynthConfig c;
    c.n_per_cell = 120;
    c.seed = seed;
    return c;
}

} // namespace

TEST(Synthetic, SameSeedSameBits) {
    const auto a = generate_synthetic(small_config(4));
    const auto b = generate_synthetic(small_config(4));
    EXPECT_TRUE(bit_identical(a.train, b.train));
    EXPECT_TRUE(bit_identical(a.test_far, b.test_far));
    EXPECT_TRUE(bit_identical(a.test_adjacent, b.test_adjacent));
    EXPECT_EQ(a.far_domains, b.far_domains);
    const auto c = generate_synthetic(small_config(5));
    EXPECT_FALSE(bit_identical(a.train, c.train));
}

TEST(Synthetic, Shapes) {
    const auto cfg = small_config(1);
    const auto d = generate_synthetic(cfg);
    EXPECT_EQ(d.split.heldout_classes.size(), 2u);
    EXPECT_EQ(d.train.rows(), 4u * 120u);
    EXPECT_EQ(d.train.dim(), cfg.d_dim + cfg.y_dim);
    EXPECT_EQ(d.test_adjacent.rows(), 2u * 120u);
    EXPECT_EQ(d.test_far.rows(), 2u * 4u * 120u);
    EXPECT_EQ(d.far_domains.size(), d.test_far.rows());
    for (auto dom : d.far_domains) EXPECT_TRUE(dom == 1 || dom == 2);
}

TEST(Synthetic, DomainBlockCarriesNoLabelInformation) {
    auto cfg = small_config(2);
    cfg.n_per_cell = 2000;
    const auto d = generate_synthetic(cfg);
    const auto& x = d.train.features;
    const auto& y = *d.train.labels;
    // Per-class mean of each x_d coordinate stays within 4 standard errors of 0.
    const double se = cfg.domain_noise_sigma / std::sqrt(static_cast<double>(cfg.n_per_cell));
    for (std::int32_t c = 0; c < 4; ++c) {
        for (std::size_t j = 0; j < cfg.d_dim; ++j) {
            double sum = 0;
            for (std::size_t i = 0; i < y.size(); ++i) {
                if (y[i] == c) sum += x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            }
            EXPECT_LT(std::fabs(sum / static_cast<double>(cfg.n_per_cell)), 4 * se) << c << "," << j;
        }
    }
}

TEST(Synthetic, FarDomainsSitAtDomainSep) {
    const auto cfg = small_config(3);
    const auto d = generate_synthetic(cfg);
    for (std::int32_t dom : {1, 2}) {
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cfg.d_dim));
        double n = 0;
        for (std::size_t i = 0; i < d.far_domains.size(); ++i) {
            if (d.far_domains[i] != dom) continue;
            mean += d.test_far.features.row(static_cast<Eigen::Index>(i)).head(static_cast<Eigen::Index>(cfg.d_dim))
                        .cast<double>().transpose();
            n += 1;
        }
        EXPECT_NEAR((mean / n).norm(), cfg.domain_sep, 1.0);
    }
}

TEST(Synthetic, DegenerateConfigs) {
    auto c = small_config(0);
    c.n_per_cell = 0;
    EXPECT_THROW(generate_synthetic(c), ValidationError);
    c = small_config(0);
    c.n_classes = 2;
    EXPECT_THROW(generate_synthetic(c), ValidationError);
    c = small_config(0);
    c.y_dim = 3;
    EXPECT_THROW(generate_synthetic(c), ValidationError);
}

TEST(LinearModel, ChanceAccuracyWithoutClassSignal) {
    auto cfg = small_config(6);
    cfg.class_sep = 0.0;
    cfg.n_per_cell = 300;
    const auto d = generate_synthetic(cfg);
    TrainConfig t;
    t.max_epochs = 500;
    const auto model = train_linear(d.train, t);
    const double acc = model.accuracy(d.test_id.features, *d.test_id.labels);
    // Four ID classes; 4.5 binomial standard errors around 1/4.
    const double n = static_cast<double>(d.test_id.rows());
    EXPECT_NEAR(acc, 0.25, 4.5 * std::sqrt(0.25 * 0.75 / n));
}

TEST(LinearModel, SeparableWithoutDecayReachesFullTrainAccuracy) {
    auto cfg = small_config(7);
    cfg.class_sep = 12.0;
    cfg.noise_sigma = 0.5;
    const auto d = generate_synthetic(cfg);
    TrainConfig t;
    t.weight_decay = 0.0;
    t.max_epochs = 2000;
    const auto model = train_linear(d.train, t);
    EXPECT_EQ(model.accuracy(d.train.features, *d.train.labels), 1.0);
}

TEST(LinearModel, ZeroInitIsEquivariantUnderClassRelabelling) {
    const auto d = generate_synthetic(small_config(8));
    const std::vector<std::int32_t> perm{2, 0, 3, 1};
    std::vector<std::int32_t> relabelled;
    for (auto l : *d.train.labels) relabelled.push_back(perm[static_cast<std::size_t>(l)]);
    TrainConfig t;
    t.max_epochs = 200;
    const auto a = train_linear(d.train.features, *d.train.labels, 4, t);
    const auto b = train_linear(d.train.features, relabelled, 4, t);
    for (int c = 0; c < 4; ++c) {
        EXPECT_LT((a.weights.row(c) - b.weights.row(perm[static_cast<std::size_t>(c)])).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_NEAR(a.bias(c), b.bias(perm[static_cast<std::size_t>(c)]), 1e-10);
    }
}

TEST(LinearModel, DecayShrinksDomainBlock) {
    SynthConfig cfg;
    cfg.seed = 9;
    const auto d = generate_synthetic(cfg);
    const auto model = train_linear(d.train, TrainConfig{});
    EXPECT_LT(block_norm_ratio(model, cfg.d_dim), 0.05);
}

TEST(LinearModel, MinibatchIsDeterministic) {
    const auto d = generate_synthetic(small_config(10));
    TrainConfig t;
    t.batch_size = 64;
    t.max_epochs = 30;
    t.seed = 3;
    const auto a = train_linear(d.train, t);
    const auto b = train_linear(d.train, t);
    EXPECT_EQ(a.weights, b.weights);
    EXPECT_EQ(a.bias, b.bias);
}

TEST(LinearModel, DivergenceRaisesTrainingError) {
    auto cfg = small_config(11);
    cfg.domain_sep = 1e6;
    const auto d = generate_synthetic(cfg);
    TrainConfig t;
    t.learning_rate = 1e305;
    t.weight_decay = 0.0;
    try {
        train_linear(d.train, t);
        FAIL();
    } catch (const TrainingError& e) {
        EXPECT_NE(std::string(e.what()).find("smaller learning rate"), std::string::npos) << e.what();
    }
}

TEST(LinearModel, SupervisedViewIsConsistent) {
    const auto d = generate_synthetic(small_config(12));
    TrainConfig t;
    t.max_epochs = 50;
    const auto model = train_linear(d.train, t);
    const auto view = supervised_view(model, d.test_far, false);
    EXPECT_NO_THROW(view.validate());
    EXPECT_FALSE(view.labels);
    EXPECT_EQ(view.dim(), 4u);
    EXPECT_TRUE(view.head.has_value());
}

TEST(Probe, SeparatedDomainsCertifyMostInformation) {
    CounterRng rng(13, 0);
    const std::size_t n = 900;
    MatrixF rep(n, 3);
    std::vector<std::int32_t> dom(n);
    for (std::size_t i = 0; i < n; ++i) {
        dom[i] = static_cast<std::int32_t>(i % 3);
        for (Eigen::Index j = 0; j < 3; ++j) {
            rep(static_cast<Eigen::Index>(i), j) =
                static_cast<float>(rng.normal() + (j == dom[i] ? 20.0 : 0.0));
        }
    }
    const auto r = probe_domain_mi_bound(rep, dom);
    EXPECT_NEAR(r.domain_entropy, std::log(3.0), 1e-12);
    EXPECT_GE(r.bound, 0.9 * r.domain_entropy);
    EXPECT_EQ(r.train_rows + r.heldout_rows, n);
}

TEST(Probe, NoiseCertifiesNothing) {
    CounterRng rng(14, 0);
    const std::size_t n = 1500;
    MatrixF rep(n, 4);
    std::vector<std::int32_t> dom(n);
    for (std::size_t i = 0; i < n; ++i) {
        dom[i] = static_cast<std::int32_t>(rng.below(3));
        for (Eigen::Index j = 0; j < 4; ++j) rep(static_cast<Eigen::Index>(i), j) = static_cast<float>(rng.normal());
    }
    const auto r = probe_domain_mi_bound(rep, dom);
    EXPECT_GT(r.error_rate, 0.5);
    EXPECT_LE(r.bound, 0.1 * r.domain_entropy);
}

// The certified bound may not exceed a plug-in estimate from a fine
// histogram of a 1-D representation, across separations.
TEST(Probe, BoundBelowBinnedPluginEstimate) {
    for (double sep : {0.0, 0.5, 1.0, 2.0, 4.0}) {
        CounterRng rng(15, 0);
        const std::size_t n = 3000;
        MatrixF rep(n, 1);
        std::vector<std::int32_t> dom(n);
        for (std::size_t i = 0; i < n; ++i) {
            dom[i] = static_cast<std::int32_t>(i % 3);
            rep(static_cast<Eigen::Index>(i), 0) = static_cast<float>(rng.normal() + sep * dom[i]);
        }
        const auto r = probe_domain_mi_bound(rep, dom);

        const double lo = rep.minCoeff();
        const double hi = rep.maxCoeff();
        const int bins = 40;
        std::vector<std::array<double, 3>> joint(bins, {0.0, 0.0, 0.0});
        for (std::size_t i = 0; i < n; ++i) {
            int b = static_cast<int>((rep(static_cast<Eigen::Index>(i), 0) - lo) / (hi - lo) * bins);
            b = std::min(b, bins - 1);
            joint[static_cast<std::size_t>(b)][static_cast<std::size_t>(dom[i])] += 1.0 / n;
        }
        double mi = 0.0;
        for (const auto& row : joint) {
            const double pb = row[0] + row[1] + row[2];
            for (double pj : row) {
                if (pj > 0.0) mi += pj * std::log(pj / (pb / 3.0));
            }
        }
        EXPECT_LE(r.bound, mi + 0.02) << "sep=" << sep << " plug-in " << mi;
    }
}

TEST(Probe, SingleDomainRejected) {
    MatrixF rep = MatrixF::Ones(20, 2);
    const std::vector<std::int32_t> dom(20, 1);
    EXPECT_THROW(probe_domain_mi_bound(rep, dom), ValidationError);
}

TEST(Collapse, SingleSeedEndToEnd) {
    CollapseConfig cfg;
    cfg.synth.seed = 0;
    const auto r = collapse_experiment(cfg);
    const double h = r.probe_raw.domain_entropy;
    EXPECT_LT(r.weight_ratio, 0.05);
    EXPECT_GE(r.probe_raw.bound, 0.9 * h);
    EXPECT_LE(r.probe_logits.bound, 0.1 * h);
    EXPECT_LT(r.far_fpr_two_stage, r.far_fpr_second_stage);
    EXPECT_GT(r.test_accuracy, 0.9);
    const auto j = nlohmann::json::parse(collapse_report_json(r));
    EXPECT_EQ(j["seed"], 0);
    EXPECT_FALSE(format_collapse_report(r).empty());
}
