#include "oodkit/detectors/scores.hpp"

#include "oodkit/error.hpp"

#include <algorithm>
#include <cmath>

namespace oodkit {

namespace {

void check_logits(std::span<const double> logits) {
    if (logits.size() < 2) {
        throw ValidationError("logit score: need at least two classes");
    }
    for (double v : logits) {
        if (!std::isfinite(v)) {
            throw ValidationError("logit score: non-finite logit");
        }
    }
}

} // namespace

double logsumexp(std::span<const double> values) {
    if (values.empty()) {
        throw ValidationError("logsumexp: empty input");
    }
    const double top = *std::max_element(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += std::exp(v - top);
    return top + std::log(sum);
}

double score_msp(std::span<const double> logits) {
    check_logits(logits);
    const double top = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double v : logits) sum += std::exp(v - top);
    return 1.0 / sum;
}

double score_energy(std::span<const double> logits, double temperature) {
    check_logits(logits);
    if (!(temperature > 0.0) || !std::isfinite(temperature)) {
        throw ValidationError("energy score: temperature must be positive");
    }
    const double top = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double v : logits) sum += std::exp((v - top) / temperature);
    return top + temperature * std::log(sum);
}

} // namespace oodkit
