#include <oodkit/error.hpp>
#include <oodkit/io/oodf.hpp>

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>

using namespace oodkit;
using namespace oodkit::io;
namespace fs = std::filesystem;

namespace {

MatrixF mat(std::initializer_list<std::initializer_list<float>> data) {
    MatrixF m(static_cast<Eigen::Index>(data.size()), static_cast<Eigen::Index>(data.begin()->size()));
    Eigen::Index i = 0;
    for (const auto& r : data) {
        Eigen::Index j = 0;
        for (float v : r) m(i, j++) = v;
        ++i;
    }
    return m;
}

// Same content as tests/data/make_golden_oodf.py.
FeatureSet golden_set() {
    FeatureSet s;
    s.features = mat({{0.1f, 0.2f, 0.3f}, {-0.0f, 1e-7f, 65504.0f}, {-2.5f, 3.25f, 1e30f}});
    s.penultimate = mat({{0.5f, -1.25f}, {2.0f, 0.1f}, {-3.0f, 4.5f}});
    s.head = ClassifierHead{mat({{1.0f, 0.5f}, {-0.25f, 2.0f}}), Eigen::Vector2f(0.75f, -1.5f)};
    MatrixF logits(3, 2);
    for (int i = 0; i < 3; ++i) {
        for (int c = 0; c < 2; ++c) {
            double acc = 0.0;
            for (int j = 0; j < 2; ++j) {
                acc += static_cast<double>(s.head->weights(c, j)) * static_cast<double>((*s.penultimate)(i, j));
            }
            logits(i, c) = static_cast<float>(acc + static_cast<double>(s.head->bias(c)));
        }
    }
    s.logits = logits;
    s.labels = std::vector<std::int32_t>{0, 1, 1};
    s.meta = {"golden", "test", 42};
    return s;
}

FeatureSet small_set() {
    FeatureSet s;
    s.features = mat({{1.5f, -2.0f}, {0.25f, 3.0f}, {7.0f, 8.0f}});
    s.meta = {"unit", "train", 3};
    return s;
}

std::uint32_t read_u32(const std::vector<std::uint8_t>& b, std::size_t at) {
    return static_cast<std::uint32_t>(b[at]) | static_cast<std::uint32_t>(b[at + 1]) << 8 |
           static_cast<std::uint32_t>(b[at + 2]) << 16 | static_cast<std::uint32_t>(b[at + 3]) << 24;
}

// Recomputes digest and sidecar after a payload edit so that only the
// check under test can fire.
std::vector<std::uint8_t> reseal(std::vector<std::uint8_t> bytes) {
    const std::size_t sidecar_len = read_u32(bytes, 24);
    bytes.resize(bytes.size() - sidecar_len);
    std::fill(bytes.begin() + 24, bytes.begin() + 28, std::uint8_t{0});
    const std::string sidecar = R"({"format":"OODF","version":1,"hash":"sha256","digest":")" + sha256_hex(bytes) +
                                R"(","source":"x","split":"y","seed":0})";
    for (int s = 0; s < 4; ++s) bytes[24 + static_cast<std::size_t>(s)] = static_cast<std::uint8_t>(sidecar.size() >> (8 * s));
    bytes.insert(bytes.end(), sidecar.begin(), sidecar.end());
    return bytes;
}

FormatError::Kind decode_kind(const std::vector<std::uint8_t>& bytes) {
    try {
        decode_feature_set(bytes);
    } catch (const FormatError& e) {
        return e.kind();
    }
    ADD_FAILURE() << "decode accepted corrupted bytes";
    return FormatError::Kind::BadSidecar;
}

} // namespace

TEST(Oodf, RoundTripBitIdentical) {
    const auto s = small_set();
    const auto bytes = encode_feature_set(s);
    EXPECT_EQ(bytes.size(), 32u + 3 * 2 * 4 + read_u32(bytes, 24));
    OodfInfo info;
    const auto back = decode_feature_set(bytes, &info);
    EXPECT_TRUE(bit_identical(s, back));
    EXPECT_EQ(back.meta, s.meta);
    EXPECT_EQ(info.header.flags, 0);
    EXPECT_EQ(info.digest.size(), 64u);
}

TEST(Oodf, RoundTripAllBlocks) {
    const auto s = golden_set();
    const auto back = decode_feature_set(encode_feature_set(s));
    EXPECT_TRUE(bit_identical(s, back));
    ASSERT_TRUE(back.labels);
    EXPECT_EQ(*back.labels, *s.labels);
    EXPECT_TRUE(std::signbit(back.features(1, 0)));
}

TEST(Oodf, GoldenBytesFromIndependentWriter) {
    const fs::path path = fs::path(OODKIT_TEST_DATA_DIR) / "golden.oodf";
    const auto file = read_bytes(path);
    OodfInfo info;
    const auto decoded = decode_feature_set(file, &info);
    EXPECT_EQ(info.digest, "3547aa7dc6548fb71a942870c1bee448d7bb1d9dc69e53648bc962187b7ba932");
    EXPECT_EQ(info.header.flags, 0b1111);
    const auto expected = golden_set();
    EXPECT_TRUE(bit_identical(decoded, expected));
    EXPECT_EQ(decoded.meta, expected.meta);
    EXPECT_EQ(encode_feature_set(expected), file);
}

TEST(Oodf, FileRoundTripAndDigest) {
    const auto dir = fs::temp_directory_path() / ("oodf_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
    fs::create_directories(dir);
    const auto path = dir / "a.oodf";
    const auto digest = write_feature_file(small_set(), path);
    OodfInfo info;
    const auto back = read_feature_file(path, &info);
    EXPECT_EQ(info.digest, digest);
    EXPECT_TRUE(bit_identical(back, small_set()));
    for (const auto& entry : fs::directory_iterator(dir)) {
        EXPECT_EQ(entry.path().filename(), "a.oodf");
    }
    EXPECT_THROW(read_feature_file(dir / "missing.oodf"), IoError);
    fs::remove_all(dir);
}

TEST(Oodf, TruncatedPayload) {
    auto bytes = encode_feature_set(small_set());
    for (std::size_t cut : {std::size_t{1}, std::size_t{10}, bytes.size() - 20}) {
        std::vector<std::uint8_t> part(bytes.begin(), bytes.end() - static_cast<std::ptrdiff_t>(cut));
        EXPECT_EQ(decode_kind(part), FormatError::Kind::SizeMismatch);
    }
    std::vector<std::uint8_t> tiny(bytes.begin(), bytes.begin() + 12);
    EXPECT_EQ(decode_kind(tiny), FormatError::Kind::SizeMismatch);
}

TEST(Oodf, HeaderCorruption) {
    const auto bytes = encode_feature_set(small_set());
    auto magic = bytes;
    magic[0] = 'X';
    EXPECT_EQ(decode_kind(magic), FormatError::Kind::BadMagic);
    auto version = bytes;
    version[4] = 2;
    EXPECT_EQ(decode_kind(version), FormatError::Kind::BadVersion);
    auto flags = bytes;
    flags[6] = 0x10;
    EXPECT_EQ(decode_kind(flags), FormatError::Kind::BadVersion);
    auto reserved = bytes;
    reserved[28] = 1;
    EXPECT_EQ(decode_kind(reserved), FormatError::Kind::DigestMismatch);
}

TEST(Oodf, PayloadBitFlipFailsDigest) {
    const auto bytes = encode_feature_set(small_set());
    auto flipped = bytes;
    flipped[32 + 5] ^= 0x01;
    EXPECT_EQ(decode_kind(flipped), FormatError::Kind::DigestMismatch);
}

TEST(Oodf, SidecarProblems) {
    const auto bytes = encode_feature_set(small_set());
    const std::size_t len = read_u32(bytes, 24);
    auto garbled = bytes;
    garbled[bytes.size() - len] = '[';
    EXPECT_EQ(decode_kind(garbled), FormatError::Kind::BadSidecar);
    auto no_hash = bytes;
    const std::string s(bytes.end() - static_cast<std::ptrdiff_t>(len), bytes.end());
    const auto at = s.find("sha256");
    ASSERT_NE(at, std::string::npos);
    no_hash[bytes.size() - len + at] = 'S';
    EXPECT_EQ(decode_kind(no_hash), FormatError::Kind::BadSidecar);
}

TEST(Oodf, NonFinitePayload) {
    auto bytes = encode_feature_set(small_set());
    const auto nan = std::bit_cast<std::uint32_t>(std::numeric_limits<float>::quiet_NaN());
    for (int s = 0; s < 4; ++s) bytes[32 + static_cast<std::size_t>(s)] = static_cast<std::uint8_t>(nan >> (8 * s));
    EXPECT_EQ(decode_kind(reseal(bytes)), FormatError::Kind::NonFinite);
}

TEST(Oodf, SemanticViolationsAfterFraming) {
    auto s = golden_set();
    auto bytes = encode_feature_set(s);
    // Label 7 with two classes, framing intact.
    bytes[bytes.size() - read_u32(bytes, 24) - 4] = 7;
    EXPECT_THROW(decode_feature_set(reseal(bytes)), ValidationError);
}

TEST(Oodf, EncodeRejectsInvalidSets) {
    FeatureSet empty;
    EXPECT_THROW(encode_feature_set(empty), ValidationError);
    auto s = golden_set();
    (*s.logits)(0, 0) += 1.0f;
    EXPECT_THROW(encode_feature_set(s), ValidationError);
}
