#include "oodkit/harness/split.hpp"

#include "oodkit/error.hpp"
#include "oodkit/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <set>

namespace oodkit::harness {

namespace {
constexpr std::uint64_t kSplitStream = 0x73706c6974; // "split"
}

std::size_t heldout_count(std::size_t classes, double fraction) {
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw ValidationError("split: held-out fraction must lie in (0, 1)");
    }
    const auto rounded = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(classes) + 0.5));
    return std::max<std::size_t>(1, rounded);
}

SplitSpec make_adjacent_split(std::span<const std::int32_t> classes, std::uint64_t seed, double fraction) {
    const std::set<std::int32_t> distinct(classes.begin(), classes.end());
    if (distinct.size() < 3) {
        throw ValidationError("split: need at least 3 classes to hold some out and keep 2 in distribution");
    }
    const std::size_t held = heldout_count(distinct.size(), fraction);
    if (held + 2 > distinct.size()) {
        throw ValidationError("split: held-out fraction leaves fewer than 2 ID classes");
    }
    std::vector<std::int32_t> order(distinct.begin(), distinct.end());
    CounterRng rng(seed, kSplitStream);
    rng.shuffle(std::span<std::int32_t>(order));

    SplitSpec split;
    split.seed = seed;
    split.fraction = fraction;
    split.heldout_classes.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(held));
    split.id_classes.assign(order.begin() + static_cast<std::ptrdiff_t>(held), order.end());
    std::sort(split.heldout_classes.begin(), split.heldout_classes.end());
    std::sort(split.id_classes.begin(), split.id_classes.end());
    return split;
}

std::string split_to_json(const SplitSpec& split) {
    nlohmann::ordered_json j;
    j["format"] = "oodkit-split";
    j["version"] = 1;
    j["rng"] = CounterRng::kName;
    j["seed"] = split.seed;
    j["fraction"] = split.fraction;
    j["id_classes"] = split.id_classes;
    j["heldout_classes"] = split.heldout_classes;
    return j.dump(2) + "\n";
}

SplitSpec split_from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        SplitSpec split;
        split.seed = j.at("seed").get<std::uint64_t>();
        split.fraction = j.at("fraction").get<double>();
        split.id_classes = j.at("id_classes").get<std::vector<std::int32_t>>();
        split.heldout_classes = j.at("heldout_classes").get<std::vector<std::int32_t>>();
        return split;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("split: malformed split record: ") + e.what());
    }
}

} // namespace oodkit::harness
