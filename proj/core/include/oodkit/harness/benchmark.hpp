#pragma once

#include "oodkit/detectors/detector_model.hpp"
#include "oodkit/harness/report.hpp"
#include "oodkit/io/manifest.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace oodkit::harness {

// msp, energy, mahalanobis, knn, react: second-stage detectors on the
// supervised features. pt-knn: KNN distance in the pretrained space alone.
// df+X: domain filter in the pretrained space followed by X.
struct MethodSpec {
    std::string name;
    DetectorKind base = DetectorKind::knn;
    bool filtered = false;
    bool pretrained_only = false;
};

MethodSpec parse_method(std::string_view name);

struct CalibrationEntry {
    std::int64_t seed = 0;
    double threshold = 0.0;
    double percentile = 0.0;
    std::size_t k = 0;
    bool normalize = true;
    std::string train_digest; // digest of the pretrained train file
};

struct CalibrationRecord {
    std::vector<CalibrationEntry> entries;

    const CalibrationEntry* find(std::int64_t seed) const;
};

std::string calibration_to_json(const CalibrationRecord& record);
CalibrationRecord calibration_from_json(const std::string& text);

// Fits the domain filter of every run in the manifest.
CalibrationRecord calibrate_manifest(const io::Manifest& manifest, std::size_t workers = 1);

struct BenchmarkOptions {
    std::size_t workers = 1;
    // Thresholds from an earlier calibration; their train digests must
    // match the manifest's files.
    const CalibrationRecord* calibration = nullptr;
    std::size_t histogram_bins = 0; // 0 disables histogram export
};

// Fits every method on each run's ID train set and scores the ID test set
// against each OOD set. Methods that cannot consume the features yield NA
// rows.
EvalReport run_benchmark(const io::Manifest& manifest, const BenchmarkOptions& options = {},
                         std::vector<HistogramRecord>* histograms = nullptr);

// Two-stage methods only, one section per filter percentile, plus the
// stage-one ID flag rate per seed and percentile.
EvalReport percentile_sweep(const io::Manifest& manifest, std::span<const double> grid,
                            const BenchmarkOptions& options = {});

} // namespace oodkit::harness
