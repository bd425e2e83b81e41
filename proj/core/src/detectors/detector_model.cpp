#include "oodkit/detectors/detector_model.hpp"

#include "oodkit/detectors/scores.hpp"
#include "oodkit/error.hpp"
#include "oodkit/quantile.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

namespace oodkit {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_width(std::span<const double> row, std::size_t expected, const char* who) {
    if (row.size() != expected) {
        throw ValidationError(std::string(who) + ": input has dimension " + std::to_string(row.size()) +
                              ", model expects " + std::to_string(expected));
    }
}

double mahalanobis_score(const MahalanobisState& s, std::span<const double> x) {
    check_width(x, static_cast<std::size_t>(s.precision.rows()), "mahalanobis");
    const Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < s.means.rows(); ++c) {
        const Eigen::VectorXd diff = v - s.means.row(c).transpose();
        best = std::min(best, diff.dot(s.precision * diff));
    }
    return -best;
}

double react_score(const ReactState& s, std::span<const double> a) {
    check_width(a, static_cast<std::size_t>(s.weights.cols()), "react");
    Eigen::VectorXd clipped(static_cast<Eigen::Index>(a.size()));
    for (std::size_t j = 0; j < a.size(); ++j) {
        clipped(static_cast<Eigen::Index>(j)) = std::min(a[j], s.clip);
    }
    const Eigen::VectorXd logits = s.weights * clipped + s.bias;
    return score_energy(std::span<const double>(logits.data(), static_cast<std::size_t>(logits.size())), 1.0);
}

} // namespace

std::string_view to_string(DetectorKind kind) {
    switch (kind) {
    case DetectorKind::msp: return "msp";
    case DetectorKind::energy: return "energy";
    case DetectorKind::mahalanobis: return "mahalanobis";
    case DetectorKind::knn: return "knn";
    case DetectorKind::react: return "react";
    }
    return "unknown";
}

DetectorKind parse_detector_kind(std::string_view name) {
    for (auto kind : {DetectorKind::msp, DetectorKind::energy, DetectorKind::mahalanobis, DetectorKind::knn,
                      DetectorKind::react}) {
        if (to_string(kind) == name) return kind;
    }
    throw ValidationError("unknown detector '" + std::string(name) + "'");
}

DetectorModel DetectorModel::msp() { return DetectorModel(MspState{}); }

DetectorModel DetectorModel::energy(double temperature) {
    if (!(temperature > 0.0) || !std::isfinite(temperature)) {
        throw ValidationError("energy: temperature must be positive");
    }
    return DetectorModel(EnergyState{temperature});
}

DetectorModel::DetectorModel(State state) : state_(std::move(state)) {}

DetectorKind DetectorModel::kind() const noexcept {
    return std::visit(overloaded{[](const MspState&) { return DetectorKind::msp; },
                                 [](const EnergyState&) { return DetectorKind::energy; },
                                 [](const MahalanobisState&) { return DetectorKind::mahalanobis; },
                                 [](const KnnState&) { return DetectorKind::knn; },
                                 [](const ReactState&) { return DetectorKind::react; }},
                      state_);
}

ScoreInput DetectorModel::input() const noexcept {
    switch (kind()) {
    case DetectorKind::msp:
    case DetectorKind::energy: return ScoreInput::logits;
    case DetectorKind::react: return ScoreInput::penultimate;
    default: return ScoreInput::features;
    }
}

std::optional<std::size_t> DetectorModel::input_dim() const noexcept {
    return std::visit(
        overloaded{[](const MspState&) -> std::optional<std::size_t> { return std::nullopt; },
                   [](const EnergyState&) -> std::optional<std::size_t> { return std::nullopt; },
                   [](const MahalanobisState& s) -> std::optional<std::size_t> {
                       return static_cast<std::size_t>(s.precision.rows());
                   },
                   [](const KnnState& s) -> std::optional<std::size_t> { return s.index.dim(); },
                   [](const ReactState& s) -> std::optional<std::size_t> {
                       return static_cast<std::size_t>(s.weights.cols());
                   }},
        state_);
}

double DetectorModel::score(std::span<const double> row) const {
    return std::visit(overloaded{[&](const MspState&) { return score_msp(row); },
                                 [&](const EnergyState& s) { return score_energy(row, s.temperature); },
                                 [&](const MahalanobisState& s) { return mahalanobis_score(s, row); },
                                 [&](const KnnState& s) { return -s.index.kth_distance(row, s.k); },
                                 [&](const ReactState& s) { return react_score(s, row); }},
                      state_);
}

std::vector<double> DetectorModel::score_all(const FeatureSet& set, std::size_t workers) const {
    const MatrixF* block = nullptr;
    switch (input()) {
    case ScoreInput::logits:
        if (!set.logits) throw NotApplicableError(std::string(to_string(kind())) + " needs logits");
        block = &*set.logits;
        break;
    case ScoreInput::penultimate:
        if (!set.penultimate) {
            throw NotApplicableError(std::string(to_string(kind())) + " needs penultimate activations");
        }
        block = &*set.penultimate;
        break;
    case ScoreInput::features:
        block = &set.features;
        break;
    }
    if (const auto* knn = std::get_if<KnnState>(&state_)) {
        auto distances = knn->index.kth_distances(*block, knn->k, workers);
        for (double& d : distances) d = -d;
        return distances;
    }
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(block->rows()));
    for (Eigen::Index i = 0; i < block->rows(); ++i) {
        const auto row = to_double({block->data() + i * block->cols(), static_cast<std::size_t>(block->cols())});
        out.push_back(score(row));
    }
    return out;
}

DetectorModel fit_mahalanobis(const FeatureSet& train, const MahalanobisOptions& options) {
    if (!train.labels) {
        throw FitError("mahalanobis: training set has no labels");
    }
    const auto n = static_cast<Eigen::Index>(train.rows());
    const auto dim = static_cast<Eigen::Index>(train.dim());
    const Eigen::MatrixXd x = train.features.cast<double>();

    std::map<std::int32_t, std::vector<Eigen::Index>> members;
    for (Eigen::Index i = 0; i < n; ++i) {
        members[(*train.labels)[static_cast<std::size_t>(i)]].push_back(i);
    }
    MahalanobisState state;
    state.means.resize(static_cast<Eigen::Index>(members.size()), dim);
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::Index c = 0;
    for (const auto& [label, rows] : members) {
        if (rows.size() < 2) {
            throw FitError("mahalanobis: class " + std::to_string(label) + " has fewer than 2 samples");
        }
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
        for (auto i : rows) mean += x.row(i).transpose();
        mean /= static_cast<double>(rows.size());
        for (auto i : rows) {
            const Eigen::VectorXd diff = x.row(i).transpose() - mean;
            cov.noalias() += diff * diff.transpose();
        }
        state.classes.push_back(label);
        state.means.row(c++) = mean.transpose();
    }
    cov /= static_cast<double>(n);
    state.shrinkage = options.shrinkage.value_or(1e-6 * cov.trace() / static_cast<double>(dim));
    if (!(state.shrinkage >= 0.0) || !std::isfinite(state.shrinkage)) {
        throw FitError("mahalanobis: shrinkage must be finite and non-negative");
    }
    cov.diagonal().array() += state.shrinkage;
    const Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success || cov.diagonal().minCoeff() <= 0.0) {
        throw FitError("mahalanobis: covariance is singular after shrinkage");
    }
    state.precision = llt.solve(Eigen::MatrixXd::Identity(dim, dim));
    state.precision = 0.5 * (state.precision + state.precision.transpose()).eval();
    return DetectorModel(std::move(state));
}

DetectorModel fit_knn(const FeatureSet& train, std::size_t k, bool normalize) {
    if (k == 0 || k > train.rows()) {
        throw ValidationError("knn: k must lie in [1, " + std::to_string(train.rows()) + "]");
    }
    return DetectorModel(KnnState{KnnIndex(train.features, normalize), k});
}

DetectorModel fit_react(const FeatureSet& train, double clip_percentile) {
    if (!train.penultimate) {
        throw FitError("react: training set is missing penultimate activations");
    }
    if (!train.head) {
        throw FitError("react: training set is missing head weights");
    }
    if (!(clip_percentile > 0.0 && clip_percentile < 100.0)) {
        throw ValidationError("react: clip percentile must lie in (0, 100)");
    }
    const auto& acts = *train.penultimate;
    const std::vector<double> pooled(acts.data(), acts.data() + acts.size());
    ReactState state;
    state.percentile = clip_percentile;
    state.clip = nearest_rank_quantile(pooled, clip_percentile / 100.0);
    if (!(state.clip > 0.0) || !std::isfinite(state.clip)) {
        throw FitError("react: clip threshold " + std::to_string(state.clip) + " is not a positive finite value");
    }
    state.weights = train.head->weights.cast<double>();
    state.bias = train.head->bias.cast<double>();
    return DetectorModel(std::move(state));
}

double score_mahalanobis(const DetectorModel& model, std::span<const double> x) {
    const auto* s = std::get_if<MahalanobisState>(&model.state());
    if (s == nullptr) throw ValidationError("score_mahalanobis: model is not a mahalanobis detector");
    return mahalanobis_score(*s, x);
}

double score_knn(const DetectorModel& model, std::span<const double> x) {
    const auto* s = std::get_if<KnnState>(&model.state());
    if (s == nullptr) throw ValidationError("score_knn: model is not a knn detector");
    return -s->index.kth_distance(x, s->k);
}

double score_react(const DetectorModel& model, std::span<const double> penultimate) {
    const auto* s = std::get_if<ReactState>(&model.state());
    if (s == nullptr) throw ValidationError("score_react: model is not a react detector");
    return react_score(*s, penultimate);
}

} // namespace oodkit
