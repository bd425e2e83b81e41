#pragma once

#include "oodkit/feature_set.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace oodkit::io {

// OODF v1: a 32-byte little-endian header, the payload blocks, then a JSON
// sidecar. See docs/oodf_format.md for the byte layout.
inline constexpr char kOodfMagic[4] = {'O', 'O', 'D', 'F'};
inline constexpr std::uint16_t kOodfVersion = 1;
inline constexpr std::size_t kOodfHeaderSize = 32;

enum OodfFlags : std::uint16_t {
    kHasLogits = 1u << 0,
    kHasPenultimate = 1u << 1,
    kHasHead = 1u << 2,
    kHasLabels = 1u << 3,
};

struct OodfHeader {
    std::uint16_t version = kOodfVersion;
    std::uint16_t flags = 0;
    std::uint32_t n_rows = 0;
    std::uint32_t feat_dim = 0;
    std::uint32_t n_classes = 0;
    std::uint32_t penult_dim = 0;
    std::uint32_t sidecar_len = 0;

    std::uint64_t payload_bytes() const;
};

struct OodfInfo {
    OodfHeader header;
    std::string digest;  // hex SHA-256 of header and payload
    std::string sidecar; // raw JSON text
};

std::string sha256_hex(std::span<const std::uint8_t> bytes);

// In-memory encode/decode. decode throws FormatError (bad magic, bad
// version, size mismatch, digest mismatch, non-finite payload, bad sidecar)
// or ValidationError for semantic violations.
std::vector<std::uint8_t> encode_feature_set(const FeatureSet& set);
FeatureSet decode_feature_set(std::span<const std::uint8_t> bytes, OodfInfo* info = nullptr);

// Writes via a temporary file and rename. Returns the digest.
std::string write_feature_file(const FeatureSet& set, const std::filesystem::path& path);
FeatureSet read_feature_file(const std::filesystem::path& path, OodfInfo* info = nullptr);

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);

} // namespace oodkit::io
