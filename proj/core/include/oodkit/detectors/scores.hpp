#pragma once

#include <span>

namespace oodkit {

// All scores are oriented so that higher means more in-distribution.

// log(sum(exp(v))) with max subtraction.
double logsumexp(std::span<const double> values);

// Maximum softmax probability, in (1/C, 1].
double score_msp(std::span<const double> logits);

// T * logsumexp(logits / T).
double score_energy(std::span<const double> logits, double temperature = 1.0);

} // namespace oodkit
