#pragma once

#include "oodkit/harness/metrics.hpp"
#include "oodkit/harness/wilcoxon.hpp"
#include "oodkit/io/manifest.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace oodkit::harness {

using io::OodKind;

// One (ID dataset, OOD dataset, method, seed) cell. Metrics are nullopt
// when the method cannot consume the features (reported as NA).
struct EvalRow {
    std::string id_dataset;
    std::string ood_dataset;
    OodKind kind = OodKind::far;
    std::string method;
    std::int64_t seed = 0;
    std::optional<double> percentile; // filter percentile, two-stage rows only
    std::optional<double> fpr95;
    std::optional<double> auroc;
    std::size_t n_id = 0;
    std::size_t n_ood = 0;

    friend bool operator==(const EvalRow&, const EvalRow&) = default;
};

// Mean of the applicable rows in three orders. They coincide on complete
// grids and differ only when some cells are NA.
struct MeanSummary {
    std::optional<double> row_mean;
    std::optional<double> dataset_first; // per seed over datasets, then over seeds
    std::optional<double> seed_first;    // per dataset over seeds, then over datasets
    std::size_t rows = 0;
};

struct MethodAggregate {
    std::string id_dataset;
    std::string method;
    std::optional<double> percentile;
    MeanSummary fpr_in, fpr_out, auroc_in, auroc_out;
};

// Paired test across seeds of a filtered method against its unfiltered
// second stage, on the per-seed mean far FPR@95. Positive differences
// favour the filter.
struct SignificanceResult {
    std::string id_dataset;
    std::string method;
    std::string baseline;
    std::optional<double> percentile;
    std::vector<double> diffs;
    std::optional<WilcoxonResult> test;
    std::string note;
};

struct FlagRate {
    std::int64_t seed = 0;
    double percentile = 0.0;
    double threshold = 0.0;
    double id_flag_rate = 0.0;
};

struct EvalReport {
    std::vector<EvalRow> rows; // canonical order
    std::vector<MethodAggregate> aggregates;
    std::vector<SignificanceResult> significance;
    std::vector<FlagRate> flag_rates;
    bool flag_rates_monotone = true;
};

// Sort key: id dataset, method, percentile, kind (adjacent first), OOD
// dataset, seed.
void canonicalize(std::vector<EvalRow>& rows);
std::vector<MethodAggregate> aggregate_rows(const std::vector<EvalRow>& rows);
std::vector<SignificanceResult> significance_tests(const std::vector<EvalRow>& rows);

// Canonicalizes rows and fills aggregates and significance.
EvalReport assemble_report(std::vector<EvalRow> rows);

std::string method_label(const std::string& method, std::optional<double> percentile);

// Tab-separated, one row per cell, numbers as %.6f, NA for missing.
std::string format_table(const EvalReport& report);
std::vector<EvalRow> parse_table(const std::string& text);

// Human-readable "in / out" summary.
std::string format_summary(const EvalReport& report);

struct HistogramRecord {
    std::string method;
    std::int64_t seed = 0;
    std::string ood_dataset;
    std::optional<double> percentile;
    std::vector<HistogramBin> bins;
};

std::string format_histograms(const std::vector<HistogramRecord>& records);

} // namespace oodkit::harness
