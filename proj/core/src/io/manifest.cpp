#include "oodkit/io/manifest.hpp"

#include "oodkit/error.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace oodkit::io {

namespace {

using nlohmann::json;

constexpr const char* kFormat = "oodkit-manifest";
constexpr int kVersion = 1;

template <class T>
T field(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) {
        throw ValidationError("manifest: " + where + " lacks '" + key + "'");
    }
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ValidationError("manifest: " + where + "." + key + " has the wrong type");
    }
}

template <class T>
T field_or(const json& obj, const char* key, T fallback, const std::string& where) {
    return obj.contains(key) ? field<T>(obj, key, where) : fallback;
}

FeaturePair parse_pair(const json& obj, const std::string& where) {
    if (!obj.is_object()) {
        throw ValidationError("manifest: " + where + " must be an object");
    }
    FeaturePair pair;
    pair.supervised = field<std::string>(obj, "supervised", where);
    pair.pretrained = field_or<std::string>(obj, "pretrained", "", where);
    return pair;
}

json pair_json(const FeaturePair& pair) {
    json out = json::object();
    out["supervised"] = pair.supervised;
    if (!pair.pretrained.empty()) out["pretrained"] = pair.pretrained;
    return out;
}

void check_file(const Manifest& m, const std::string& relative, const std::string& entry) {
    if (relative.empty()) return;
    const auto path = m.resolve(relative);
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) {
        throw IoError("manifest entry " + entry + ": file '" + path.string() + "' does not exist");
    }
}

} // namespace

std::string to_string(OodKind kind) { return kind == OodKind::adjacent ? "adjacent" : "far"; }

OodKind parse_ood_kind(const std::string& text) {
    if (text == "adjacent") return OodKind::adjacent;
    if (text == "far") return OodKind::far;
    throw ValidationError("unknown OOD kind '" + text + "' (expected adjacent or far)");
}

Manifest parse_manifest(const std::string& text, const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("manifest: invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ValidationError("manifest: top level must be an object");
    }
    if (field<std::string>(doc, "format", "manifest") != kFormat) {
        throw ValidationError(std::string("manifest: format must be '") + kFormat + "'");
    }
    if (field<int>(doc, "version", "manifest") != kVersion) {
        throw ValidationError("manifest: unsupported version");
    }
    Manifest m;
    m.base_dir = base_dir;
    m.id_dataset = field<std::string>(doc, "id_dataset", "manifest");
    m.methods = field<std::vector<std::string>>(doc, "methods", "manifest");
    m.knn_k = field_or<std::size_t>(doc, "knn_k", m.knn_k, "manifest");
    m.filter_k = field_or<std::size_t>(doc, "filter_k", m.filter_k, "manifest");
    m.percentile = field_or<double>(doc, "percentile", m.percentile, "manifest");
    m.normalize = field_or<bool>(doc, "normalize", m.normalize, "manifest");
    m.react_percentile = field_or<double>(doc, "react_percentile", m.react_percentile, "manifest");
    m.energy_temperature = field_or<double>(doc, "energy_temperature", m.energy_temperature, "manifest");
    if (doc.contains("mahalanobis_shrinkage") && !doc["mahalanobis_shrinkage"].is_null()) {
        m.mahalanobis_shrinkage = field<double>(doc, "mahalanobis_shrinkage", "manifest");
    }
    m.percentile_grid = field_or<std::vector<double>>(doc, "percentile_grid", m.percentile_grid, "manifest");

    if (m.methods.empty()) throw ValidationError("manifest: methods is empty");
    if (m.knn_k == 0 || m.filter_k == 0) throw ValidationError("manifest: knn_k and filter_k must be positive");
    if (!(m.percentile > 0.0 && m.percentile <= 1.0)) throw ValidationError("manifest: percentile must lie in (0, 1]");
    for (double p : m.percentile_grid) {
        if (!(p > 0.0 && p <= 1.0)) throw ValidationError("manifest: percentile_grid values must lie in (0, 1]");
    }
    if (!(m.energy_temperature > 0.0)) throw ValidationError("manifest: energy_temperature must be positive");

    const auto& runs = doc.contains("runs") ? doc["runs"] : json();
    if (!runs.is_array() || runs.empty()) {
        throw ValidationError("manifest: runs must be a non-empty array");
    }
    for (std::size_t r = 0; r < runs.size(); ++r) {
        const std::string where = "runs[" + std::to_string(r) + "]";
        const auto& run = runs[r];
        if (!run.is_object()) throw ValidationError("manifest: " + where + " must be an object");
        RunEntry entry;
        entry.seed = field<std::int64_t>(run, "seed", where);
        entry.train = parse_pair(run.value("train", json()), where + ".train");
        entry.test = parse_pair(run.value("test", json()), where + ".test");
        const auto& ood = run.contains("ood") ? run["ood"] : json();
        if (!ood.is_array() || ood.empty()) {
            throw ValidationError("manifest: " + where + ".ood must be a non-empty array");
        }
        for (std::size_t o = 0; o < ood.size(); ++o) {
            const std::string w = where + ".ood[" + std::to_string(o) + "]";
            OodEntry e;
            e.name = field<std::string>(ood[o], "name", w);
            e.kind = parse_ood_kind(field<std::string>(ood[o], "kind", w));
            e.files = parse_pair(ood[o], w);
            entry.ood.push_back(std::move(e));
        }
        m.runs.push_back(std::move(entry));
    }
    return m;
}

Manifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open manifest '" + path.string() + "'");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    auto m = parse_manifest(buffer.str(), path.parent_path());
    for (std::size_t r = 0; r < m.runs.size(); ++r) {
        const auto& run = m.runs[r];
        const std::string where = "runs[" + std::to_string(r) + "]";
        check_file(m, run.train.supervised, where + ".train.supervised");
        check_file(m, run.train.pretrained, where + ".train.pretrained");
        check_file(m, run.test.supervised, where + ".test.supervised");
        check_file(m, run.test.pretrained, where + ".test.pretrained");
        for (std::size_t o = 0; o < run.ood.size(); ++o) {
            const std::string w = where + ".ood[" + std::to_string(o) + "]";
            check_file(m, run.ood[o].files.supervised, w + ".supervised");
            check_file(m, run.ood[o].files.pretrained, w + ".pretrained");
        }
    }
    return m;
}

std::string manifest_to_json(const Manifest& m) {
    nlohmann::ordered_json doc;
    doc["format"] = kFormat;
    doc["version"] = kVersion;
    doc["id_dataset"] = m.id_dataset;
    doc["methods"] = m.methods;
    doc["knn_k"] = m.knn_k;
    doc["filter_k"] = m.filter_k;
    doc["percentile"] = m.percentile;
    doc["normalize"] = m.normalize;
    doc["react_percentile"] = m.react_percentile;
    doc["energy_temperature"] = m.energy_temperature;
    doc["mahalanobis_shrinkage"] = m.mahalanobis_shrinkage ? json(*m.mahalanobis_shrinkage) : json(nullptr);
    doc["percentile_grid"] = m.percentile_grid;
    auto runs = nlohmann::ordered_json::array();
    for (const auto& run : m.runs) {
        nlohmann::ordered_json r;
        r["seed"] = run.seed;
        r["train"] = pair_json(run.train);
        r["test"] = pair_json(run.test);
        auto ood = nlohmann::ordered_json::array();
        for (const auto& e : run.ood) {
            nlohmann::ordered_json o;
            o["name"] = e.name;
            o["kind"] = to_string(e.kind);
            o["supervised"] = e.files.supervised;
            if (!e.files.pretrained.empty()) o["pretrained"] = e.files.pretrained;
            ood.push_back(std::move(o));
        }
        r["ood"] = std::move(ood);
        runs.push_back(std::move(r));
    }
    doc["runs"] = std::move(runs);
    return doc.dump(2) + "\n";
}

} // namespace oodkit::io
