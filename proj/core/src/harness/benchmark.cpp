#include "oodkit/harness/benchmark.hpp"

#include "oodkit/error.hpp"
#include "oodkit/io/oodf.hpp"
#include "oodkit/two_stage.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <map>

namespace oodkit::harness {

namespace {

constexpr const char* kCalibrationFormat = "oodkit-calibration";

// Feature files of one run, loaded once and keyed by manifest path.
class RunFiles {
public:
    explicit RunFiles(const io::Manifest& manifest) : manifest_(manifest) {}

    const FeatureSet& get(const std::string& relative, const std::string& entry, const std::string& needed_by = "") {
        if (relative.empty()) {
            throw ValidationError("manifest entry " + entry + " is required" +
                                  (needed_by.empty() ? std::string() : " by " + needed_by));
        }
        auto it = cache_.find(relative);
        if (it == cache_.end()) {
            io::OodfInfo info;
            try {
                auto set = io::read_feature_file(manifest_.resolve(relative), &info);
                it = cache_.emplace(relative, Loaded{std::move(set), info.digest}).first;
            } catch (const FormatError& e) {
                throw FormatError(e.kind(), "manifest entry " + entry + ": " + e.what());
            } catch (const IoError& e) {
                throw IoError("manifest entry " + entry + ": " + e.what());
            } catch (const ValidationError& e) {
                throw ValidationError("manifest entry " + entry + ": " + e.what());
            }
        }
        return it->second.set;
    }

    const std::string& digest(const std::string& relative, const std::string& entry) {
        get(relative, entry);
        return cache_.at(relative).digest;
    }

private:
    struct Loaded {
        FeatureSet set;
        std::string digest;
    };

    const io::Manifest& manifest_;
    std::map<std::string, Loaded> cache_;
};

std::string run_name(std::size_t r) { return "runs[" + std::to_string(r) + "]"; }

bool can_fit(DetectorKind kind, const FeatureSet& set) {
    switch (kind) {
    case DetectorKind::msp:
    case DetectorKind::energy:
    case DetectorKind::knn: return true;
    case DetectorKind::mahalanobis: return set.labels.has_value();
    case DetectorKind::react: return set.penultimate.has_value() && set.head.has_value();
    }
    return false;
}

bool can_score(DetectorKind kind, const FeatureSet& set) {
    switch (kind) {
    case DetectorKind::msp:
    case DetectorKind::energy: return set.logits.has_value();
    case DetectorKind::mahalanobis:
    case DetectorKind::knn: return true;
    case DetectorKind::react: return set.penultimate.has_value();
    }
    return false;
}

DetectorModel fit_base(DetectorKind kind, const FeatureSet& train, const io::Manifest& m) {
    switch (kind) {
    case DetectorKind::msp: return DetectorModel::msp();
    case DetectorKind::energy: return DetectorModel::energy(m.energy_temperature);
    case DetectorKind::mahalanobis: return fit_mahalanobis(train, {m.mahalanobis_shrinkage});
    case DetectorKind::knn: return fit_knn(train, m.knn_k, m.normalize);
    case DetectorKind::react: return fit_react(train, m.react_percentile);
    }
    throw ValidationError("unknown detector kind");
}

FilterOptions filter_options(const io::Manifest& m, double percentile) {
    return FilterOptions{percentile, m.filter_k, m.normalize};
}

// Leave-one-out calibration is the costly step, so its distances are
// computed once per run and reused for every percentile.
class FilterCache {
public:
    FilterCache(const io::Manifest& m, const FeatureSet& train_pretrained, std::size_t workers)
        : manifest_(m), train_(train_pretrained), workers_(workers) {}

    DomainFilter at(double percentile) {
        if (!distances_) {
            KnnIndex index(train_.features, manifest_.normalize);
            if (manifest_.filter_k == 0 || manifest_.filter_k >= train_.rows()) {
                throw ValidationError("domain filter: K must lie in [1, N - 1] for leave-one-out calibration");
            }
            distances_ = index.self_excluded_distances(manifest_.filter_k, workers_);
        }
        return DomainFilter::with_threshold(train_, filter_options(manifest_, percentile),
                                            calibrate_domain_threshold(*distances_, percentile));
    }

private:
    const io::Manifest& manifest_;
    const FeatureSet& train_;
    std::size_t workers_;
    std::optional<std::vector<double>> distances_;
};

class Evaluator {
public:
    Evaluator(const io::Manifest& m, const BenchmarkOptions& options, std::vector<HistogramRecord>* histograms)
        : m_(m), options_(options), histograms_(histograms) {}

    // Appends one row per OOD set of run `r` for `spec`. `filter` is set
    // for two-stage methods.
    void evaluate(std::size_t r, RunFiles& files, const MethodSpec& spec, const DomainFilter* filter,
                  std::vector<EvalRow>& rows) {
        const auto& run = m_.runs[r];
        const std::string where = run_name(r);
        const auto& train_sup = files.get(run.train.supervised, where + ".train.supervised");
        const auto& test_sup = files.get(run.test.supervised, where + ".test.supervised");
        std::vector<const FeatureSet*> ood_sup;
        for (std::size_t o = 0; o < run.ood.size(); ++o) {
            ood_sup.push_back(&files.get(run.ood[o].files.supervised, ood_entry(r, o) + ".supervised"));
        }

        std::vector<std::optional<std::vector<double>>> ood_scores(run.ood.size());
        std::vector<double> id_scores;
        std::vector<std::size_t> ood_rows;
        for (const auto* s : ood_sup) ood_rows.push_back(s->rows());
        std::size_t n_id = test_sup.rows();

        if (spec.pretrained_only) {
            const auto& train_pre = files.get(run.train.pretrained, where + ".train.pretrained", spec.name);
            const auto& test_pre = files.get(run.test.pretrained, where + ".test.pretrained", spec.name);
            const auto model = fit_knn(train_pre, m_.filter_k, m_.normalize);
            id_scores = model.score_all(test_pre, options_.workers);
            n_id = test_pre.rows();
            for (std::size_t o = 0; o < run.ood.size(); ++o) {
                const auto& pre = files.get(run.ood[o].files.pretrained, ood_entry(r, o) + ".pretrained", spec.name);
                ood_scores[o] = model.score_all(pre, options_.workers);
                ood_rows[o] = pre.rows();
            }
        } else if (can_fit(spec.base, train_sup) && can_score(spec.base, test_sup) &&
                   (!filter || can_score(spec.base, train_sup))) {
            auto model = fit_base(spec.base, train_sup, m_);
            if (!filter) {
                id_scores = model.score_all(test_sup, options_.workers);
                for (std::size_t o = 0; o < run.ood.size(); ++o) {
                    if (can_score(spec.base, *ood_sup[o])) {
                        ood_scores[o] = model.score_all(*ood_sup[o], options_.workers);
                    }
                }
            } else {
                TwoStageDetector detector(*filter, std::move(model), train_sup);
                std::vector<TwoStageDetector::BatchView> batches;
                std::vector<std::size_t> batch_ood;
                batches.push_back({&files.get(run.test.pretrained, where + ".test.pretrained", spec.name), &test_sup});
                for (std::size_t o = 0; o < run.ood.size(); ++o) {
                    const auto& pre =
                        files.get(run.ood[o].files.pretrained, ood_entry(r, o) + ".pretrained", spec.name);
                    if (can_score(spec.base, *ood_sup[o])) {
                        batches.push_back({&pre, ood_sup[o]});
                        batch_ood.push_back(o);
                    }
                }
                auto scored = detector.score_batches(batches, options_.workers);
                id_scores = std::move(scored[0]);
                for (std::size_t b = 0; b < batch_ood.size(); ++b) ood_scores[batch_ood[b]] = std::move(scored[b + 1]);
            }
        }

        for (std::size_t o = 0; o < run.ood.size(); ++o) {
            EvalRow row;
            row.id_dataset = m_.id_dataset;
            row.ood_dataset = run.ood[o].name;
            row.kind = run.ood[o].kind;
            row.method = spec.name;
            row.seed = run.seed;
            if (filter) row.percentile = filter->percentile();
            row.n_id = n_id;
            row.n_ood = ood_rows[o];
            if (!id_scores.empty() && ood_scores[o]) {
                row.fpr95 = fpr_at_tpr(id_scores, *ood_scores[o]);
                row.auroc = auroc(id_scores, *ood_scores[o]);
                if (histograms_ != nullptr && options_.histogram_bins > 0) {
                    histograms_->push_back(HistogramRecord{spec.name, run.seed, run.ood[o].name, row.percentile,
                                                           score_histogram(id_scores, *ood_scores[o],
                                                                           options_.histogram_bins)});
                }
            }
            rows.push_back(std::move(row));
        }
    }

private:
    static std::string ood_entry(std::size_t r, std::size_t o) {
        return run_name(r) + ".ood[" + std::to_string(o) + "]";
    }

    const io::Manifest& m_;
    const BenchmarkOptions& options_;
    std::vector<HistogramRecord>* histograms_;
};

std::vector<MethodSpec> parse_methods(const io::Manifest& m) {
    std::vector<MethodSpec> specs;
    for (const auto& name : m.methods) specs.push_back(parse_method(name));
    return specs;
}

bool any_filtered(const std::vector<MethodSpec>& specs) {
    return std::any_of(specs.begin(), specs.end(), [](const MethodSpec& s) { return s.filtered; });
}

} // namespace

MethodSpec parse_method(std::string_view name) {
    MethodSpec spec;
    spec.name = std::string(name);
    if (name == "pt-knn") {
        spec.pretrained_only = true;
        spec.base = DetectorKind::knn;
        return spec;
    }
    std::string_view base = name;
    if (name.rfind("df+", 0) == 0) {
        spec.filtered = true;
        base = name.substr(3);
    }
    try {
        spec.base = parse_detector_kind(base);
    } catch (const ValidationError&) {
        throw ValidationError("unknown method '" + std::string(name) +
                              "' (expected msp, energy, mahalanobis, knn, react, pt-knn or df+<method>)");
    }
    return spec;
}

const CalibrationEntry* CalibrationRecord::find(std::int64_t seed) const {
    for (const auto& e : entries) {
        if (e.seed == seed) return &e;
    }
    return nullptr;
}

std::string calibration_to_json(const CalibrationRecord& record) {
    nlohmann::ordered_json doc;
    doc["format"] = kCalibrationFormat;
    doc["version"] = 1;
    auto runs = nlohmann::ordered_json::array();
    for (const auto& e : record.entries) {
        nlohmann::ordered_json j;
        j["seed"] = e.seed;
        j["threshold"] = e.threshold;
        j["percentile"] = e.percentile;
        j["k"] = e.k;
        j["normalize"] = e.normalize;
        j["train_digest"] = e.train_digest;
        runs.push_back(std::move(j));
    }
    doc["runs"] = std::move(runs);
    return doc.dump(2) + "\n";
}

CalibrationRecord calibration_from_json(const std::string& text) {
    CalibrationRecord record;
    try {
        const auto doc = nlohmann::json::parse(text);
        if (doc.at("format").get<std::string>() != kCalibrationFormat || doc.at("version").get<int>() != 1) {
            throw ValidationError("calibration record: unsupported format or version");
        }
        for (const auto& j : doc.at("runs")) {
            CalibrationEntry e;
            e.seed = j.at("seed").get<std::int64_t>();
            e.threshold = j.at("threshold").get<double>();
            e.percentile = j.at("percentile").get<double>();
            e.k = j.at("k").get<std::size_t>();
            e.normalize = j.at("normalize").get<bool>();
            e.train_digest = j.at("train_digest").get<std::string>();
            record.entries.push_back(std::move(e));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("calibration record: ") + e.what());
    }
    return record;
}

CalibrationRecord calibrate_manifest(const io::Manifest& manifest, std::size_t workers) {
    CalibrationRecord record;
    for (std::size_t r = 0; r < manifest.runs.size(); ++r) {
        const auto& run = manifest.runs[r];
        RunFiles files(manifest);
        const std::string entry = run_name(r) + ".train.pretrained";
        const auto& train = files.get(run.train.pretrained, entry, "calibrate");
        FilterCache cache(manifest, train, workers);
        const auto filter = cache.at(manifest.percentile);
        record.entries.push_back(CalibrationEntry{run.seed, filter.threshold(), filter.percentile(), filter.k(),
                                                  filter.normalize(), files.digest(run.train.pretrained, entry)});
    }
    return record;
}

EvalReport run_benchmark(const io::Manifest& manifest, const BenchmarkOptions& options,
                         std::vector<HistogramRecord>* histograms) {
    const auto specs = parse_methods(manifest);
    Evaluator evaluator(manifest, options, histograms);
    std::vector<EvalRow> rows;
    for (std::size_t r = 0; r < manifest.runs.size(); ++r) {
        const auto& run = manifest.runs[r];
        RunFiles files(manifest);
        std::optional<DomainFilter> filter;
        if (any_filtered(specs)) {
            const std::string entry = run_name(r) + ".train.pretrained";
            const auto& train_pre = files.get(run.train.pretrained, entry, "two-stage methods");
            if (options.calibration != nullptr) {
                const auto* cal = options.calibration->find(run.seed);
                if (cal == nullptr) {
                    throw ValidationError("calibration record has no entry for seed " + std::to_string(run.seed));
                }
                if (cal->train_digest != files.digest(run.train.pretrained, entry)) {
                    throw ValidationError("calibration record for seed " + std::to_string(run.seed) +
                                          " was made from a different " + entry + " file");
                }
                filter = DomainFilter::with_threshold(train_pre, FilterOptions{cal->percentile, cal->k, cal->normalize},
                                                      cal->threshold);
            } else {
                filter = FilterCache(manifest, train_pre, options.workers).at(manifest.percentile);
            }
        }
        for (const auto& spec : specs) {
            evaluator.evaluate(r, files, spec, spec.filtered ? &*filter : nullptr, rows);
        }
    }
    return assemble_report(std::move(rows));
}

EvalReport percentile_sweep(const io::Manifest& manifest, std::span<const double> grid,
                            const BenchmarkOptions& options) {
    if (grid.empty()) {
        throw ValidationError("percentile sweep: empty percentile grid");
    }
    std::vector<double> ps(grid.begin(), grid.end());
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    std::vector<MethodSpec> specs;
    for (const auto& spec : parse_methods(manifest)) {
        if (spec.filtered) specs.push_back(spec);
    }
    if (specs.empty()) {
        throw ValidationError("percentile sweep: the manifest lists no two-stage (df+) method");
    }

    Evaluator evaluator(manifest, options, nullptr);
    std::vector<EvalRow> rows;
    std::vector<FlagRate> flags;
    bool monotone = true;
    for (std::size_t r = 0; r < manifest.runs.size(); ++r) {
        const auto& run = manifest.runs[r];
        RunFiles files(manifest);
        const auto& train_pre = files.get(run.train.pretrained, run_name(r) + ".train.pretrained", "percentile sweep");
        const auto& test_pre = files.get(run.test.pretrained, run_name(r) + ".test.pretrained", "percentile sweep");
        FilterCache cache(manifest, train_pre, options.workers);
        std::optional<double> previous;
        for (double p : ps) {
            const auto filter = cache.at(p);
            const auto d = filter.distances(test_pre, options.workers);
            const auto flagged = std::count_if(d.begin(), d.end(), [&](double v) { return v > filter.threshold(); });
            const double rate = static_cast<double>(flagged) / static_cast<double>(d.size());
            if (previous && rate > *previous) monotone = false;
            previous = rate;
            flags.push_back(FlagRate{run.seed, p, filter.threshold(), rate});
            for (const auto& spec : specs) evaluator.evaluate(r, files, spec, &filter, rows);
        }
    }
    auto report = assemble_report(std::move(rows));
    report.flag_rates = std::move(flags);
    report.flag_rates_monotone = monotone;
    return report;
}

} // namespace oodkit::harness
