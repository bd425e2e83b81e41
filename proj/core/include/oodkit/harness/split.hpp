#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace oodkit::harness {

struct SplitSpec {
    std::uint64_t seed = 0;
    std::vector<std::int32_t> id_classes;      // ascending
    std::vector<std::int32_t> heldout_classes; // ascending
    double fraction = 1.0 / 3.0;

    friend bool operator==(const SplitSpec&, const SplitSpec&) = default;
};

// Held-out class count: max(1, floor(fraction * C + 0.5)).
std::size_t heldout_count(std::size_t classes, double fraction);

// Shuffles the distinct classes with CounterRng(seed, stream "split") and
// holds out the first heldout_count of them. Needs C >= 3 and leaves at
// least two ID classes.
SplitSpec make_adjacent_split(std::span<const std::int32_t> classes, std::uint64_t seed,
                              double fraction = 1.0 / 3.0);

std::string split_to_json(const SplitSpec& split);
SplitSpec split_from_json(const std::string& text);

} // namespace oodkit::harness
