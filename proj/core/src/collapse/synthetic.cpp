#include "oodkit/collapse/synthetic.hpp"

#include "oodkit/error.hpp"
#include "oodkit/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace oodkit::collapse {

namespace {

constexpr std::uint64_t kSynthStream = 0x73796e7468; // "synth"

struct Cell {
    std::size_t domain;
    std::int32_t cls;
    std::int32_t label;
};

FeatureSet draw(CounterRng& rng, const SynthConfig& c, const std::vector<Cell>& cells,
                const std::vector<Eigen::VectorXd>& domain_means, const char* split) {
    const std::size_t dim = c.d_dim + c.y_dim;
    FeatureSet set;
    set.features.resize(static_cast<Eigen::Index>(cells.size() * c.n_per_cell), static_cast<Eigen::Index>(dim));
    std::vector<std::int32_t> labels;
    labels.reserve(cells.size() * c.n_per_cell);
    const double scale = c.class_sep / std::sqrt(2.0);
    Eigen::Index row = 0;
    for (const auto& cell : cells) {
        for (std::size_t i = 0; i < c.n_per_cell; ++i, ++row) {
            for (std::size_t j = 0; j < c.d_dim; ++j) {
                const double v = domain_means[cell.domain](static_cast<Eigen::Index>(j)) + c.domain_noise_sigma * rng.normal();
                set.features(row, static_cast<Eigen::Index>(j)) = static_cast<float>(v);
            }
            for (std::size_t j = 0; j < c.y_dim; ++j) {
                const double mean = static_cast<std::size_t>(cell.cls) == j ? scale : 0.0;
                set.features(row, static_cast<Eigen::Index>(c.d_dim + j)) =
                    static_cast<float>(mean + c.noise_sigma * rng.normal());
            }
            labels.push_back(cell.label);
        }
    }
    set.labels = std::move(labels);
    set.meta = FeatureMeta{"synthetic", split, static_cast<std::int64_t>(c.seed)};
    return set;
}

} // namespace

void SynthConfig::validate() const {
    if (n_classes < 3) throw ValidationError("synthetic: need at least 3 classes to hold some out");
    if (n_domains < 2) throw ValidationError("synthetic: need at least 2 domains");
    if (n_per_cell == 0) throw ValidationError("synthetic: n_per_cell must be positive");
    if (d_dim == 0) throw ValidationError("synthetic: d_dim must be positive");
    if (y_dim < n_classes) throw ValidationError("synthetic: y_dim must be at least n_classes for simplex class means");
    for (double v : {class_sep, domain_sep, noise_sigma, domain_noise_sigma}) {
        if (!std::isfinite(v) || v < 0.0) throw ValidationError("synthetic: separations and noise must be finite and >= 0");
    }
}

SyntheticData generate_synthetic(const SynthConfig& config) {
    config.validate();
    SyntheticData data;
    std::vector<std::int32_t> classes(config.n_classes);
    std::iota(classes.begin(), classes.end(), 0);
    data.split = harness::make_adjacent_split(classes, config.seed, config.heldout_fraction);

    CounterRng rng(config.seed, kSynthStream);
    std::vector<Eigen::VectorXd> domain_means(config.n_domains, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(config.d_dim)));
    for (std::size_t d = 1; d < config.n_domains; ++d) {
        Eigen::VectorXd u(static_cast<Eigen::Index>(config.d_dim));
        for (Eigen::Index j = 0; j < u.size(); ++j) u(j) = rng.normal();
        domain_means[d] = config.domain_sep * u / u.norm();
    }

    std::vector<Cell> id_cells;
    for (std::size_t i = 0; i < data.split.id_classes.size(); ++i) {
        id_cells.push_back({0, data.split.id_classes[i], static_cast<std::int32_t>(i)});
    }
    std::vector<Cell> adjacent_cells;
    for (auto c : data.split.heldout_classes) adjacent_cells.push_back({0, c, c});
    std::vector<Cell> far_cells;
    for (std::size_t d = 1; d < config.n_domains; ++d) {
        for (std::size_t i = 0; i < data.split.id_classes.size(); ++i) {
            far_cells.push_back({d, data.split.id_classes[i], static_cast<std::int32_t>(i)});
        }
    }

    data.train = draw(rng, config, id_cells, domain_means, "train");
    data.test_id = draw(rng, config, id_cells, domain_means, "test");
    data.test_adjacent = draw(rng, config, adjacent_cells, domain_means, "adjacent");
    data.test_far = draw(rng, config, far_cells, domain_means, "far");
    for (const auto& cell : far_cells) {
        data.far_domains.insert(data.far_domains.end(), config.n_per_cell, static_cast<std::int32_t>(cell.domain));
    }
    return data;
}

} // namespace oodkit::collapse
