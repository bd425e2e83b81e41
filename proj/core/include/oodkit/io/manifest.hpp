#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace oodkit::io {

enum class OodKind { adjacent, far };

std::string to_string(OodKind kind);
OodKind parse_ood_kind(const std::string& text);

// A pair of views of the same rows: the supervised (second-stage) space and
// the optional pretrained (filter) space.
struct FeaturePair {
    std::string supervised;
    std::string pretrained; // empty when absent
};

struct OodEntry {
    std::string name;
    OodKind kind = OodKind::far;
    FeaturePair files;
};

struct RunEntry {
    std::int64_t seed = 0;
    FeaturePair train;
    FeaturePair test;
    std::vector<OodEntry> ood;
};

// Benchmark manifest, version 1. Paths are relative to the manifest's
// directory. See docs/manifest_format.md.
struct Manifest {
    std::string id_dataset;
    std::vector<std::string> methods;
    std::size_t knn_k = 50;
    std::size_t filter_k = 50;
    double percentile = 0.99;
    bool normalize = true;
    double react_percentile = 90.0;
    double energy_temperature = 1.0;
    std::optional<double> mahalanobis_shrinkage;
    std::vector<double> percentile_grid{0.98, 0.99, 0.999};
    std::vector<RunEntry> runs;
    std::filesystem::path base_dir;

    std::filesystem::path resolve(const std::string& relative) const { return base_dir / relative; }
};

// Parses and validates structure; throws ValidationError on bad content.
Manifest parse_manifest(const std::string& text, const std::filesystem::path& base_dir);

// Reads, parses and checks that every referenced file exists. A missing
// file raises IoError naming the entry, e.g. "runs[0].ood[1].pretrained".
Manifest load_manifest(const std::filesystem::path& path);

std::string manifest_to_json(const Manifest& manifest);

} // namespace oodkit::io
