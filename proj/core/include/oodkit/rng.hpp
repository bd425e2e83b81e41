#pragma once

#include <cstdint>
#include <span>
#include <utility>

namespace oodkit {

// Counter-based generator "splitmix64-ctr/v1".
//
// Draw i (0-based) of stream (seed, stream) is
//     mix64(key + (i + 1) * 0x9E3779B97F4A7C15),  key = mix64(seed ^ mix64(stream))
// where mix64 is the SplitMix64 finalizer. The integer outputs are fully
// specified, so anything derived from them with integer arithmetic (shuffles,
// class splits) is reproducible across platforms and languages. Floating
// variates go through libm (log, cos) and are reproducible per platform only.
class CounterRng {
public:
    static constexpr const char* kName = "splitmix64-ctr/v1";

    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

    std::uint64_t next_u64() noexcept;

    // Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;

    // Uniform integer on [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n) noexcept;

    // Standard normal via Box-Muller (one output per two uniforms).
    double normal() noexcept;

    // Exp(1) variate.
    double exponential() noexcept;

    std::uint64_t counter() const noexcept { return counter_; }

    template <typename T>
    void shuffle(std::span<T> values) noexcept {
        // Fisher-Yates, descending.
        for (std::size_t i = values.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(values[i - 1], values[j]);
        }
    }

    static std::uint64_t mix64(std::uint64_t z) noexcept;

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace oodkit
