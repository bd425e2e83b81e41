#include <oodkit/collapse/linear_model.hpp>
#include <oodkit/collapse/synthetic.hpp>
#include <oodkit/detectors/detector_model.hpp>
#include <oodkit/detectors/scores.hpp>
#include <oodkit/harness/metrics.hpp>
#include <oodkit/harness/wilcoxon.hpp>
#include <oodkit/info/bottleneck.hpp>
#include <oodkit/info/sampling.hpp>
#include <oodkit/io/oodf.hpp>
#include <oodkit/rng.hpp>
#include <oodkit/two_stage.hpp>

#include <benchmark/benchmark.h>

using namespace oodkit;

namespace {

FeatureSet gaussian(std::uint64_t seed, std::size_t n, std::size_t dim) {
    CounterRng rng(seed, 0);
    FeatureSet s;
    s.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < s.features.size(); ++i) s.features.data()[i] = static_cast<float>(rng.normal());
    return s;
}

void BM_KnnScore(benchmark::State& state) {
    const auto n_train = static_cast<std::size_t>(state.range(0));
    const auto train = gaussian(1, n_train, 64);
    const auto queries = gaussian(2, 256, 64);
    const auto model = fit_knn(train, 50, true);
    for (auto _ : state) benchmark::DoNotOptimize(model.score_all(queries));
    state.SetItemsProcessed(state.iterations() * 256);
}
BENCHMARK(BM_KnnScore)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_KnnScoreWorkers(benchmark::State& state) {
    const auto train = gaussian(1, 5000, 64);
    const auto queries = gaussian(2, 512, 64);
    const auto model = fit_knn(train, 50, true);
    const auto workers = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(model.score_all(queries, workers));
}
BENCHMARK(BM_KnnScoreWorkers)->Arg(1)->Arg(2)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_FilterCalibration(benchmark::State& state) {
    const auto train = gaussian(3, static_cast<std::size_t>(state.range(0)), 32);
    for (auto _ : state) benchmark::DoNotOptimize(DomainFilter::calibrate(train, {0.99, 50, true}).threshold());
}
BENCHMARK(BM_FilterCalibration)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_Mahalanobis(benchmark::State& state) {
    auto train = gaussian(4, 5000, 64);
    std::vector<std::int32_t> labels(5000);
    for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<std::int32_t>(i % 10);
    train.labels = labels;
    const auto queries = gaussian(5, 256, 64);
    const auto model = fit_mahalanobis(train);
    for (auto _ : state) benchmark::DoNotOptimize(model.score_all(queries));
}
BENCHMARK(BM_Mahalanobis)->Unit(benchmark::kMillisecond);

void BM_EnergyRow(benchmark::State& state) {
    CounterRng rng(6, 0);
    std::vector<double> z(static_cast<std::size_t>(state.range(0)));
    for (double& v : z) v = rng.normal();
    for (auto _ : state) benchmark::DoNotOptimize(score_energy(z));
}
BENCHMARK(BM_EnergyRow)->Arg(10)->Arg(1000);

void BM_Auroc(benchmark::State& state) {
    CounterRng rng(7, 0);
    std::vector<double> id(static_cast<std::size_t>(state.range(0))), ood(id.size());
    for (double& v : id) v = rng.normal() + 1;
    for (double& v : ood) v = rng.normal();
    for (auto _ : state) {
        benchmark::DoNotOptimize(harness::auroc(id, ood));
        benchmark::DoNotOptimize(harness::fpr_at_tpr(id, ood));
    }
}
BENCHMARK(BM_Auroc)->Arg(1000)->Arg(100000)->Unit(benchmark::kMicrosecond);

void BM_WilcoxonExact(benchmark::State& state) {
    CounterRng rng(8, 0);
    std::vector<double> d(static_cast<std::size_t>(state.range(0)));
    for (double& v : d) v = rng.normal() + 0.3;
    for (auto _ : state) benchmark::DoNotOptimize(harness::wilcoxon_signed_rank(d).p_value);
}
BENCHMARK(BM_WilcoxonExact)->Arg(5)->Arg(20);

void BM_EnumerateMinimizers(benchmark::State& state) {
    CounterRng rng(9, 0);
    const auto support = static_cast<std::size_t>(state.range(0));
    const auto joint = info::sample_single_domain_joint(rng, {support, support});
    for (auto _ : state) {
        benchmark::DoNotOptimize(info::enumerate_minimizers(joint, {1.0}, joint.support().size()).min_loss);
    }
}
BENCHMARK(BM_EnumerateMinimizers)->Arg(6)->Arg(9)->Unit(benchmark::kMillisecond);

void BM_OodfRoundTrip(benchmark::State& state) {
    const auto set = gaussian(10, static_cast<std::size_t>(state.range(0)), 128);
    for (auto _ : state) benchmark::DoNotOptimize(io::decode_feature_set(io::encode_feature_set(set)).rows());
    state.SetBytesProcessed(state.iterations() * state.range(0) * 128 * 4);
}
BENCHMARK(BM_OodfRoundTrip)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_TrainLinear(benchmark::State& state) {
    collapse::SynthConfig cfg;
    cfg.n_per_cell = 200;
    const auto data = collapse::generate_synthetic(cfg);
    collapse::TrainConfig t;
    t.max_epochs = static_cast<std::size_t>(state.range(0));
    t.tolerance = 0.0;
    for (auto _ : state) benchmark::DoNotOptimize(collapse::train_linear(data.train, t).objective);
}
BENCHMARK(BM_TrainLinear)->Arg(100)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
