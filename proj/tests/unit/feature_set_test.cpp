#include <oodkit/error.hpp>
#include <oodkit/feature_set.hpp>

#include <gtest/gtest.h>

#include <limits>

using namespace oodkit;

namespace {

FeatureSet headed() {
    FeatureSet s;
    s.penultimate = MatrixF::Ones(4, 3);
    s.features = *s.penultimate;
    s.head = ClassifierHead{MatrixF::Identity(2, 3), VectorF::Zero(2)};
    s.logits = MatrixF::Ones(4, 2);
    s.labels = std::vector<std::int32_t>{0, 1, 1, 0};
    return s;
}

} // namespace

TEST(FeatureSet, ValidConfiguration) {
    const auto s = headed();
    EXPECT_NO_THROW(s.validate());
    EXPECT_EQ(s.class_count(), 2u);
    EXPECT_EQ(s.rows(), 4u);
    EXPECT_EQ(s.dim(), 3u);
}

TEST(FeatureSet, Violations) {
    FeatureSet empty;
    EXPECT_THROW(empty.validate(), ValidationError);

    auto nan = headed();
    nan.features(1, 1) = std::numeric_limits<float>::quiet_NaN();
    EXPECT_THROW(nan.validate(), ValidationError);

    auto one_class = headed();
    one_class.logits = MatrixF::Ones(4, 1);
    one_class.head.reset();
    EXPECT_THROW(one_class.validate(), ValidationError);

    auto rows = headed();
    rows.logits = MatrixF::Ones(3, 2);
    EXPECT_THROW(rows.validate(), ValidationError);

    auto label = headed();
    (*label.labels)[2] = 2;
    EXPECT_THROW(label.validate(), ValidationError);

    auto count = headed();
    count.labels->pop_back();
    EXPECT_THROW(count.validate(), ValidationError);

    auto headless = headed();
    headless.penultimate.reset();
    EXPECT_THROW(headless.validate(), ValidationError);

    auto drift = headed();
    (*drift.logits)(0, 1) = 1.001f;
    EXPECT_THROW(drift.validate(), ValidationError);
}

TEST(FeatureSet, SelectRowsKeepsBlocksAligned) {
    auto s = headed();
    for (int i = 0; i < 4; ++i) s.features(i, 0) = static_cast<float>(i);
    const std::vector<std::size_t> pick{3, 1};
    const auto sub = s.select_rows(pick);
    EXPECT_EQ(sub.rows(), 2u);
    EXPECT_EQ(sub.features(0, 0), 3.0f);
    EXPECT_EQ(sub.features(1, 0), 1.0f);
    EXPECT_EQ(*sub.labels, (std::vector<std::int32_t>{0, 1}));
    EXPECT_TRUE(sub.head.has_value());
    EXPECT_NO_THROW(sub.validate());
}

TEST(FeatureSet, MissingBlockRows) {
    FeatureSet s;
    s.features = MatrixF::Ones(2, 2);
    EXPECT_THROW(s.logit_row(0), NotApplicableError);
    EXPECT_THROW(s.penultimate_row(0), NotApplicableError);
    EXPECT_THROW(s.feature_row(2), ValidationError);
}
