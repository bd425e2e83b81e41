#include "oodkit/io/oodf.hpp"

#include "oodkit/error.hpp"

#include <nlohmann/json.hpp>
#include <openssl/sha.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string_view>
#include <unistd.h>

namespace oodkit::io {

namespace {

constexpr std::uint16_t kKnownFlags = kHasLogits | kHasPenultimate | kHasHead | kHasLabels;

class Writer {
public:
    void u16(std::uint16_t v) {
        bytes_.push_back(static_cast<std::uint8_t>(v));
        bytes_.push_back(static_cast<std::uint8_t>(v >> 8));
    }
    void u32(std::uint32_t v) {
        for (int s = 0; s < 32; s += 8) bytes_.push_back(static_cast<std::uint8_t>(v >> s));
    }
    void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
    void block(const float* data, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) f32(data[i]);
    }
    void raw(std::string_view s) { bytes_.insert(bytes_.end(), s.begin(), s.end()); }
    std::vector<std::uint8_t>& bytes() { return bytes_; }

private:
    std::vector<std::uint8_t> bytes_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}
    std::uint16_t u16() {
        const auto v = static_cast<std::uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8));
        pos_ += 2;
        return v;
    }
    std::uint32_t u32() {
        std::uint32_t v = 0;
        for (int s = 0; s < 4; ++s) v |= static_cast<std::uint32_t>(bytes_[pos_ + static_cast<std::size_t>(s)]) << (8 * s);
        pos_ += 4;
        return v;
    }
    float f32() { return std::bit_cast<float>(u32()); }
    void matrix(MatrixF& m, std::size_t rows, std::size_t cols) {
        m.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        for (std::size_t i = 0; i < rows * cols; ++i) m.data()[i] = f32();
    }
    std::size_t pos() const { return pos_; }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

bool finite_block(const float* data, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(data[i])) return false;
    }
    return true;
}

std::uint32_t checked_u32(std::size_t v, const char* what) {
    if (v > 0xFFFFFFFFu) throw ValidationError(std::string("OODF: ") + what + " exceeds 32 bits");
    return static_cast<std::uint32_t>(v);
}

} // namespace

std::uint64_t OodfHeader::payload_bytes() const {
    const std::uint64_t n = n_rows;
    std::uint64_t floats = n * feat_dim;
    if (flags & kHasLogits) floats += n * n_classes;
    if (flags & kHasPenultimate) floats += n * penult_dim;
    if (flags & kHasHead) floats += static_cast<std::uint64_t>(n_classes) * penult_dim + n_classes;
    std::uint64_t bytes = floats * 4;
    if (flags & kHasLabels) bytes += n * 4;
    return bytes;
}

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
    unsigned char digest[SHA256_DIGEST_LENGTH];
    SHA256(bytes.data(), bytes.size(), digest);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * SHA256_DIGEST_LENGTH);
    for (unsigned char c : digest) {
        out.push_back(kHex[c >> 4]);
        out.push_back(kHex[c & 15]);
    }
    return out;
}

std::vector<std::uint8_t> encode_feature_set(const FeatureSet& set) {
    set.validate();
    OodfHeader h;
    h.n_rows = checked_u32(set.rows(), "row count");
    h.feat_dim = checked_u32(set.dim(), "feature dimension");
    h.n_classes = checked_u32(set.class_count(), "class count");
    h.penult_dim = set.penultimate ? checked_u32(static_cast<std::size_t>(set.penultimate->cols()), "penultimate dimension") : 0;
    h.flags = static_cast<std::uint16_t>((set.logits ? kHasLogits : 0) | (set.penultimate ? kHasPenultimate : 0) |
                                         (set.head ? kHasHead : 0) | (set.labels ? kHasLabels : 0));

    Writer body;
    body.raw(std::string_view(kOodfMagic, 4));
    body.u16(h.version);
    body.u16(h.flags);
    body.u32(h.n_rows);
    body.u32(h.feat_dim);
    body.u32(h.n_classes);
    body.u32(h.penult_dim);
    const std::size_t sidecar_len_offset = body.bytes().size();
    body.u32(0); // sidecar length, patched below
    body.u32(0); // reserved
    body.block(set.features.data(), static_cast<std::size_t>(set.features.size()));
    if (set.logits) body.block(set.logits->data(), static_cast<std::size_t>(set.logits->size()));
    if (set.penultimate) body.block(set.penultimate->data(), static_cast<std::size_t>(set.penultimate->size()));
    if (set.head) {
        body.block(set.head->weights.data(), static_cast<std::size_t>(set.head->weights.size()));
        body.block(set.head->bias.data(), static_cast<std::size_t>(set.head->bias.size()));
    }
    if (set.labels) {
        for (auto l : *set.labels) body.u32(static_cast<std::uint32_t>(l));
    }

    // The digest covers the header with a zero sidecar length so it can be
    // embedded in the sidecar it describes.
    const std::string digest = sha256_hex(body.bytes());
    nlohmann::ordered_json sidecar;
    sidecar["format"] = "OODF";
    sidecar["version"] = kOodfVersion;
    sidecar["hash"] = "sha256";
    sidecar["digest"] = digest;
    sidecar["source"] = set.meta.source;
    sidecar["split"] = set.meta.split;
    sidecar["seed"] = set.meta.seed;
    const std::string text = sidecar.dump();
    const auto len = checked_u32(text.size(), "sidecar length");
    auto& bytes = body.bytes();
    for (int s = 0; s < 4; ++s) bytes[sidecar_len_offset + static_cast<std::size_t>(s)] = static_cast<std::uint8_t>(len >> (8 * s));
    body.raw(text);
    return std::move(bytes);
}

FeatureSet decode_feature_set(std::span<const std::uint8_t> bytes, OodfInfo* info) {
    using Kind = FormatError::Kind;
    if (bytes.size() < kOodfHeaderSize) {
        throw FormatError(Kind::SizeMismatch, "OODF: file shorter than the 32-byte header");
    }
    if (std::memcmp(bytes.data(), kOodfMagic, 4) != 0) {
        throw FormatError(Kind::BadMagic, "OODF: bad magic, not an OODF file");
    }
    Reader r(bytes);
    r.u32(); // magic
    OodfHeader h;
    h.version = r.u16();
    h.flags = r.u16();
    if (h.version != kOodfVersion) {
        throw FormatError(Kind::BadVersion, "OODF: unsupported version " + std::to_string(h.version));
    }
    if ((h.flags & ~kKnownFlags) != 0) {
        throw FormatError(Kind::BadVersion, "OODF: unknown flag bits for version 1");
    }
    h.n_rows = r.u32();
    h.feat_dim = r.u32();
    h.n_classes = r.u32();
    h.penult_dim = r.u32();
    h.sidecar_len = r.u32();
    const std::uint32_t reserved = r.u32();
    const std::uint64_t expected = kOodfHeaderSize + h.payload_bytes() + h.sidecar_len;
    if (expected != bytes.size()) {
        throw FormatError(Kind::SizeMismatch, "OODF: header declares " + std::to_string(expected) +
                                                  " bytes, file has " + std::to_string(bytes.size()));
    }

    const std::size_t body_size = kOodfHeaderSize + static_cast<std::size_t>(h.payload_bytes());
    std::string sidecar_text(reinterpret_cast<const char*>(bytes.data() + body_size), h.sidecar_len);
    nlohmann::json sidecar;
    try {
        sidecar = nlohmann::json::parse(sidecar_text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(Kind::BadSidecar, std::string("OODF: sidecar is not valid JSON: ") + e.what());
    }
    if (!sidecar.is_object() || !sidecar.contains("digest") || !sidecar["digest"].is_string() ||
        sidecar.value("hash", "") != "sha256") {
        throw FormatError(Kind::BadSidecar, "OODF: sidecar lacks a sha256 digest");
    }
    std::vector<std::uint8_t> body(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(body_size));
    std::fill(body.begin() + 24, body.begin() + 28, std::uint8_t{0});
    const std::string digest = sha256_hex(body);
    if (digest != sidecar["digest"].get<std::string>() || reserved != 0) {
        throw FormatError(Kind::DigestMismatch, "OODF: digest mismatch, file is corrupted");
    }

    FeatureSet set;
    r.matrix(set.features, h.n_rows, h.feat_dim);
    if (h.flags & kHasLogits) r.matrix(set.logits.emplace(), h.n_rows, h.n_classes);
    if (h.flags & kHasPenultimate) r.matrix(set.penultimate.emplace(), h.n_rows, h.penult_dim);
    if (h.flags & kHasHead) {
        auto& head = set.head.emplace();
        r.matrix(head.weights, h.n_classes, h.penult_dim);
        head.bias.resize(h.n_classes);
        for (std::uint32_t c = 0; c < h.n_classes; ++c) head.bias(c) = r.f32();
    }
    if (h.flags & kHasLabels) {
        auto& labels = set.labels.emplace();
        labels.reserve(h.n_rows);
        for (std::uint32_t i = 0; i < h.n_rows; ++i) labels.push_back(static_cast<std::int32_t>(r.u32()));
    }
    auto finite = [](const MatrixF& m) { return finite_block(m.data(), static_cast<std::size_t>(m.size())); };
    if (!finite(set.features) || (set.logits && !finite(*set.logits)) ||
        (set.penultimate && !finite(*set.penultimate)) ||
        (set.head && (!finite(set.head->weights) ||
                      !finite_block(set.head->bias.data(), static_cast<std::size_t>(set.head->bias.size()))))) {
        throw FormatError(Kind::NonFinite, "OODF: payload contains non-finite floats");
    }
    set.meta.source = sidecar.value("source", "");
    set.meta.split = sidecar.value("split", "");
    set.meta.seed = sidecar.value("seed", std::int64_t{0});
    set.validate();
    if (info != nullptr) {
        info->header = h;
        info->digest = digest;
        info->sidecar = std::move(sidecar_text);
    }
    return set;
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
    std::error_code ec;
    if (std::filesystem::is_directory(path, ec)) {
        throw IoError("'" + path.string() + "' is a directory");
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw IoError("error reading '" + path.string() + "'");
    }
    return bytes;
}

std::string write_feature_file(const FeatureSet& set, const std::filesystem::path& path) {
    const auto bytes = encode_feature_set(set);
    auto tmp = path;
    tmp += ".tmp-" + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot write '" + tmp.string() + "'");
        }
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) {
            throw IoError("error writing '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw IoError("cannot move '" + tmp.string() + "' into place: " + ec.message());
    }
    OodfInfo info;
    decode_feature_set(bytes, &info);
    return info.digest;
}

FeatureSet read_feature_file(const std::filesystem::path& path, OodfInfo* info) {
    const auto bytes = read_bytes(path);
    return decode_feature_set(bytes, info);
}

} // namespace oodkit::io
