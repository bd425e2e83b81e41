#include "oodkit/collapse/linear_model.hpp"

#include "oodkit/error.hpp"
#include "oodkit/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace oodkit::collapse {

namespace {

constexpr std::uint64_t kTrainStream = 0x747261696e; // "train"

// Softmax in place; returns the summed log-sum-exp.
double softmax_rows(Eigen::MatrixXd& z) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
        const double m = z.row(i).maxCoeff();
        z.row(i) = (z.row(i).array() - m).exp();
        const double s = z.row(i).sum();
        z.row(i) /= s;
        total += m + std::log(s);
    }
    return total;
}

double objective(const Eigen::MatrixXd& x, std::span<const std::int32_t> labels, const Eigen::MatrixXd& w,
                 const Eigen::VectorXd& b, double decay) {
    Eigen::MatrixXd z = (x * w.transpose()).rowwise() + b.transpose();
    double ce = 0.0;
    for (Eigen::Index i = 0; i < z.rows(); ++i) ce -= z(i, labels[static_cast<std::size_t>(i)]);
    ce += softmax_rows(z);
    return ce / static_cast<double>(x.rows()) + decay * w.squaredNorm();
}

} // namespace

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ValidationError("train: learning rate must be positive");
    if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay)) throw ValidationError("train: weight decay must be >= 0");
    if (max_epochs == 0) throw ValidationError("train: max_epochs must be positive");
    if (!(tolerance >= 0.0)) throw ValidationError("train: tolerance must be >= 0");
}

Eigen::MatrixXd LinearModel::logits(const MatrixF& x) const {
    if (static_cast<std::size_t>(x.cols()) != dim()) {
        throw ValidationError("linear model: input has " + std::to_string(x.cols()) + " columns, model expects " +
                              std::to_string(dim()));
    }
    return (x.cast<double>() * weights.transpose()).rowwise() + bias.transpose();
}

std::vector<std::int32_t> LinearModel::predict(const MatrixF& x) const {
    const auto z = logits(x);
    std::vector<std::int32_t> out(static_cast<std::size_t>(z.rows()));
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
        Eigen::Index arg = 0;
        z.row(i).maxCoeff(&arg);
        out[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(arg);
    }
    return out;
}

double LinearModel::accuracy(const MatrixF& x, std::span<const std::int32_t> labels) const {
    const auto pred = predict(x);
    if (pred.size() != labels.size()) throw ValidationError("linear model: one label per row required");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == labels[i];
    return static_cast<double>(hits) / static_cast<double>(pred.size());
}

LinearModel train_linear(const MatrixF& x_in, std::span<const std::int32_t> labels, std::size_t classes,
                         const TrainConfig& config) {
    config.validate();
    const auto n = static_cast<std::size_t>(x_in.rows());
    if (n == 0 || labels.size() != n) throw ValidationError("train: need one label per row and at least one row");
    if (classes < 2) throw ValidationError("train: need at least two classes");
    for (auto l : labels) {
        if (l < 0 || static_cast<std::size_t>(l) >= classes) throw ValidationError("train: label outside [0, C)");
    }
    const Eigen::MatrixXd x = x_in.cast<double>();
    const auto c = static_cast<Eigen::Index>(classes);
    LinearModel model;
    model.config = config;
    model.weights = Eigen::MatrixXd::Zero(c, x.cols());
    model.bias = Eigen::VectorXd::Zero(c);

    const std::size_t batch = config.batch_size == 0 ? n : std::min(config.batch_size, n);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    CounterRng rng(config.seed, kTrainStream);

    double previous = objective(x, labels, model.weights, model.bias, config.weight_decay);
    Eigen::MatrixXd xb;
    Eigen::MatrixXd z;
    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        if (batch < n) rng.shuffle(std::span<std::size_t>(order));
        for (std::size_t start = 0; start < n; start += batch) {
            const std::size_t m = std::min(batch, n - start);
            const Eigen::MatrixXd* xs = &x;
            if (batch < n) {
                xb.resize(static_cast<Eigen::Index>(m), x.cols());
                for (std::size_t i = 0; i < m; ++i) xb.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(order[start + i]));
                xs = &xb;
            }
            z = (*xs * model.weights.transpose()).rowwise() + model.bias.transpose();
            softmax_rows(z);
            for (std::size_t i = 0; i < m; ++i) {
                const auto label = labels[batch < n ? order[start + i] : start + i];
                z(static_cast<Eigen::Index>(i), label) -= 1.0;
            }
            z /= static_cast<double>(m);
            const Eigen::MatrixXd grad_w = z.transpose() * *xs + 2.0 * config.weight_decay * model.weights;
            const Eigen::VectorXd grad_b = z.colwise().sum().transpose();
            model.weights -= config.learning_rate * grad_w;
            model.bias -= config.learning_rate * grad_b;
        }
        const double current = objective(x, labels, model.weights, model.bias, config.weight_decay);
        if (!std::isfinite(current)) {
            throw TrainingError("train: objective diverged at epoch " + std::to_string(epoch) +
                                "; try a smaller learning rate");
        }
        model.epochs = epoch;
        model.objective = current;
        if (std::abs(previous - current) < config.tolerance) {
            model.converged = true;
            break;
        }
        previous = current;
    }
    return model;
}

LinearModel train_linear(const FeatureSet& train, const TrainConfig& config) {
    if (!train.labels || train.labels->empty()) throw ValidationError("train: feature set has no labels");
    const auto top = *std::max_element(train.labels->begin(), train.labels->end());
    return train_linear(train.features, *train.labels, static_cast<std::size_t>(top) + 1, config);
}

double block_norm_ratio(const LinearModel& model, std::size_t split) {
    if (split == 0 || split >= model.dim()) throw ValidationError("block_norm_ratio: split must lie inside the weights");
    const auto s = static_cast<Eigen::Index>(split);
    const double lower = model.weights.rightCols(model.weights.cols() - s).norm();
    if (lower == 0.0) throw ValidationError("block_norm_ratio: second block is zero");
    return model.weights.leftCols(s).norm() / lower;
}

FeatureSet supervised_view(const LinearModel& model, const FeatureSet& raw, bool keep_labels) {
    FeatureSet out;
    ClassifierHead head{model.weights.cast<float>(), model.bias.cast<float>()};
    const Eigen::MatrixXd z = (raw.features.cast<double>() * head.weights.cast<double>().transpose()).rowwise() +
                              head.bias.cast<double>().transpose();
    out.features = z.cast<float>();
    out.logits = out.features;
    out.penultimate = raw.features;
    out.head = std::move(head);
    if (keep_labels) out.labels = raw.labels;
    out.meta = raw.meta;
    return out;
}

} // namespace oodkit::collapse
