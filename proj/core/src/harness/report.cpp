#include "oodkit/harness/report.hpp"

#include "oodkit/error.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>
#include <tuple>

namespace oodkit::harness {

namespace {

constexpr const char* kTableHeader =
    "id_dataset\tood_dataset\tkind\tmethod\tseed\tpercentile\tfpr95\tauroc\tn_id\tn_ood";

std::string fixed(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string fixed_or_na(const std::optional<double>& v, int digits = 6) { return v ? fixed(*v, digits) : "NA"; }

auto sort_key(const EvalRow& r) {
    return std::make_tuple(r.id_dataset, r.method, r.percentile.has_value(), r.percentile.value_or(0.0),
                           r.kind == OodKind::far, r.ood_dataset, r.seed);
}

std::optional<double> mean_of(const std::vector<double>& v) {
    if (v.empty()) return std::nullopt;
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum / static_cast<double>(v.size());
}

// Rows must already share method, percentile and kind.
MeanSummary summarize(const std::vector<const EvalRow*>& rows, std::optional<double> EvalRow::*metric) {
    MeanSummary out;
    std::vector<double> all;
    std::map<std::int64_t, std::vector<double>> by_seed;
    std::map<std::string, std::vector<double>> by_dataset;
    for (const auto* r : rows) {
        const auto& v = r->*metric;
        if (!v) continue;
        all.push_back(*v);
        by_seed[r->seed].push_back(*v);
        by_dataset[r->ood_dataset].push_back(*v);
    }
    out.rows = all.size();
    out.row_mean = mean_of(all);
    std::vector<double> seed_means;
    for (const auto& [seed, v] : by_seed) seed_means.push_back(*mean_of(v));
    out.dataset_first = mean_of(seed_means);
    std::vector<double> dataset_means;
    for (const auto& [name, v] : by_dataset) dataset_means.push_back(*mean_of(v));
    out.seed_first = mean_of(dataset_means);
    return out;
}

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find('\t', start);
        out.push_back(line.substr(start, pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

std::optional<double> parse_metric(const std::string& s, std::size_t line) {
    if (s == "NA" || s == "-") return std::nullopt;
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ValidationError("report table line " + std::to_string(line) + ": bad number '" + s + "'");
    }
}

std::string summary_cell(const MeanSummary& in, const MeanSummary& out) {
    auto pct = [](const std::optional<double>& v) { return v ? fixed(100.0 * *v, 1) : std::string("NA"); };
    return pct(in.row_mean) + " / " + pct(out.row_mean);
}

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

} // namespace

void canonicalize(std::vector<EvalRow>& rows) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const EvalRow& a, const EvalRow& b) { return sort_key(a) < sort_key(b); });
}

std::string method_label(const std::string& method, std::optional<double> percentile) {
    if (!percentile) return method;
    std::string p = fixed(*percentile, 6);
    while (p.back() == '0') p.pop_back();
    if (p.back() == '.') p.pop_back();
    return method + " [p=" + p + "]";
}

std::vector<MethodAggregate> aggregate_rows(const std::vector<EvalRow>& rows) {
    using Key = std::tuple<std::string, std::string, bool, double>;
    std::map<Key, std::pair<std::vector<const EvalRow*>, std::vector<const EvalRow*>>> groups;
    std::vector<Key> order;
    for (const auto& r : rows) {
        Key key{r.id_dataset, r.method, r.percentile.has_value(), r.percentile.value_or(0.0)};
        auto [it, inserted] = groups.try_emplace(key);
        if (inserted) order.push_back(key);
        (r.kind == OodKind::adjacent ? it->second.first : it->second.second).push_back(&r);
    }
    std::sort(order.begin(), order.end());
    std::vector<MethodAggregate> out;
    for (const auto& key : order) {
        const auto& [in_rows, out_rows] = groups[key];
        MethodAggregate agg;
        agg.id_dataset = std::get<0>(key);
        agg.method = std::get<1>(key);
        if (std::get<2>(key)) agg.percentile = std::get<3>(key);
        agg.fpr_in = summarize(in_rows, &EvalRow::fpr95);
        agg.fpr_out = summarize(out_rows, &EvalRow::fpr95);
        agg.auroc_in = summarize(in_rows, &EvalRow::auroc);
        agg.auroc_out = summarize(out_rows, &EvalRow::auroc);
        out.push_back(std::move(agg));
    }
    return out;
}

std::vector<SignificanceResult> significance_tests(const std::vector<EvalRow>& rows) {
    // (id dataset, method, percentile) -> seed -> far FPR values
    using Key = std::tuple<std::string, std::string, bool, double>;
    std::map<Key, std::map<std::int64_t, std::vector<double>>> far;
    for (const auto& r : rows) {
        if (r.kind != OodKind::far || !r.fpr95) continue;
        far[{r.id_dataset, r.method, r.percentile.has_value(), r.percentile.value_or(0.0)}][r.seed].push_back(*r.fpr95);
    }
    std::vector<SignificanceResult> out;
    for (const auto& [key, filtered] : far) {
        const auto& [id_dataset, method, has_p, p] = key;
        if (method.rfind("df+", 0) != 0) continue;
        const std::string baseline = method.substr(3);
        const auto base_it = far.find({id_dataset, baseline, false, 0.0});
        if (base_it == far.end()) continue;
        SignificanceResult res;
        res.id_dataset = id_dataset;
        res.method = method;
        res.baseline = baseline;
        if (has_p) res.percentile = p;
        for (const auto& [seed, values] : filtered) {
            const auto b = base_it->second.find(seed);
            if (b == base_it->second.end()) continue;
            res.diffs.push_back(*mean_of(b->second) - *mean_of(values));
        }
        if (res.diffs.empty()) {
            res.note = "no paired seeds";
        } else {
            try {
                res.test = wilcoxon_signed_rank(res.diffs, Alternative::greater);
            } catch (const UndefinedTestError&) {
                res.note = "undefined: all differences are zero";
            }
        }
        out.push_back(std::move(res));
    }
    return out;
}

EvalReport assemble_report(std::vector<EvalRow> rows) {
    EvalReport report;
    canonicalize(rows);
    report.rows = std::move(rows);
    report.aggregates = aggregate_rows(report.rows);
    report.significance = significance_tests(report.rows);
    return report;
}

std::string format_table(const EvalReport& report) {
    std::string out = kTableHeader;
    out += '\n';
    for (const auto& r : report.rows) {
        out += r.id_dataset + '\t' + r.ood_dataset + '\t' + io::to_string(r.kind) + '\t' + r.method + '\t' +
               std::to_string(r.seed) + '\t' + (r.percentile ? fixed(*r.percentile) : std::string("-")) + '\t' +
               fixed_or_na(r.fpr95) + '\t' + fixed_or_na(r.auroc) + '\t' + std::to_string(r.n_id) + '\t' +
               std::to_string(r.n_ood) + '\n';
    }
    return out;
}

std::vector<EvalRow> parse_table(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kTableHeader) {
        throw ValidationError("report table: missing or unexpected header");
    }
    std::vector<EvalRow> rows;
    std::size_t number = 1;
    while (std::getline(in, line)) {
        ++number;
        if (line.empty()) continue;
        const auto f = split_tabs(line);
        if (f.size() != 10) {
            throw ValidationError("report table line " + std::to_string(number) + ": expected 10 fields");
        }
        EvalRow r;
        r.id_dataset = f[0];
        r.ood_dataset = f[1];
        r.kind = io::parse_ood_kind(f[2]);
        r.method = f[3];
        try {
            r.seed = std::stoll(f[4]);
            r.n_id = std::stoull(f[8]);
            r.n_ood = std::stoull(f[9]);
        } catch (const std::exception&) {
            throw ValidationError("report table line " + std::to_string(number) + ": bad integer field");
        }
        r.percentile = parse_metric(f[5], number);
        r.fpr95 = parse_metric(f[6], number);
        r.auroc = parse_metric(f[7], number);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::string format_summary(const EvalReport& report) {
    std::ostringstream out;
    std::string current;
    for (const auto& agg : report.aggregates) {
        if (agg.id_dataset != current) {
            if (!current.empty()) out << '\n';
            current = agg.id_dataset;
            out << "ID dataset: " << current << '\n';
            out << "Scores are in / out of domain OOD, in percent (in = adjacent, out = far).\n";
            out << pad("method", 28) << pad("FPR@95 in / out", 20) << "AUROC in / out\n";
        }
        out << pad(method_label(agg.method, agg.percentile), 28) << pad(summary_cell(agg.fpr_in, agg.fpr_out), 20)
            << summary_cell(agg.auroc_in, agg.auroc_out) << '\n';
    }

    const bool any_filtered = std::any_of(report.aggregates.begin(), report.aggregates.end(),
                                          [](const auto& a) { return a.method.rfind("df+", 0) == 0; });
    if (any_filtered) {
        out << "df+ scores: samples the filter rejects rank below every accepted sample, farther ones lower.\n"
               "AUROC for df+ rows depends on that composition choice.\n";
    }

    out << "\nFar FPR@95 by aggregation order (percent)\n";
    out << pad("method", 28) << pad("row mean", 12) << pad("dataset-first", 16) << "seed-first\n";
    for (const auto& agg : report.aggregates) {
        auto pct = [](const std::optional<double>& v) { return v ? fixed(100.0 * *v, 2) : std::string("NA"); };
        out << pad(method_label(agg.method, agg.percentile), 28) << pad(pct(agg.fpr_out.row_mean), 12)
            << pad(pct(agg.fpr_out.dataset_first), 16) << pct(agg.fpr_out.seed_first) << '\n';
    }

    if (!report.significance.empty()) {
        out << "\nWilcoxon signed-rank, far FPR@95 of baseline minus filtered, one-sided\n";
        for (const auto& s : report.significance) {
            out << method_label(s.method, s.percentile) << " vs " << s.baseline << ": seeds=" << s.diffs.size();
            if (s.test) {
                out << " W+=" << fixed(s.test->w_plus, 1) << " p=" << fixed(s.test->p_value, 5)
                    << (s.test->exact ? " (exact)" : " (normal approx.)");
            } else {
                out << " " << s.note;
            }
            out << '\n';
        }
    }

    if (!report.flag_rates.empty()) {
        out << "\nStage-one ID flag rate by percentile\n";
        out << pad("seed", 8) << pad("p", 10) << pad("t_d", 12) << "flag rate\n";
        for (const auto& f : report.flag_rates) {
            out << pad(std::to_string(f.seed), 8) << pad(fixed(f.percentile, 3), 10) << pad(fixed(f.threshold, 4), 12)
                << fixed(f.id_flag_rate, 4) << '\n';
        }
        out << "flag rate non-increasing in p: " << (report.flag_rates_monotone ? "yes" : "NO") << '\n';
    }
    return out.str();
}

std::string format_histograms(const std::vector<HistogramRecord>& records) {
    std::string out = "method\tseed\tood_dataset\tbin\tlo\thi\tid_count\tood_count\n";
    for (const auto& rec : records) {
        const std::string label = method_label(rec.method, rec.percentile);
        for (std::size_t b = 0; b < rec.bins.size(); ++b) {
            const auto& bin = rec.bins[b];
            out += label + '\t' + std::to_string(rec.seed) + '\t' + rec.ood_dataset + '\t' + std::to_string(b) + '\t' +
                   fixed(bin.lo) + '\t' + fixed(bin.hi) + '\t' + std::to_string(bin.id_count) + '\t' +
                   std::to_string(bin.ood_count) + '\n';
        }
    }
    return out;
}

} // namespace oodkit::harness
