#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "vidrisk/evaluation.hpp"

using namespace vidrisk;
using vidrisk::testkit::error_code_of;

TEST(Folds, HundredIntoTenOfTen) {
  const auto a = assign_folds(testkit::numbered_ids(100), 10, 42);
  EXPECT_EQ(a.fold_sizes(), std::vector<std::size_t>(10, 10));
  EXPECT_EQ(a.fold_of.size(), 100u);
}

TEST(Folds, RemainderSpread) {
  auto sizes = assign_folds(testkit::numbered_ids(10), 3, 1).fold_sizes();
  std::sort(sizes.rbegin(), sizes.rend());
  EXPECT_EQ(sizes, (std::vector<std::size_t>{4, 3, 3}));
}

TEST(Folds, DeterministicAndSeedSensitive) {
  const auto ids = testkit::numbered_ids(37);
  EXPECT_EQ(assign_folds(ids, 5, 9), assign_folds(ids, 5, 9));
  EXPECT_NE(assign_folds(ids, 5, 9).fold_of, assign_folds(ids, 5, 10).fold_of);
}

TEST(Folds, SizesDifferByAtMostOne) {
  Rng rng(3);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + rng.below(200);
    const std::size_t k = 2 + rng.below(n - 1);
    const auto labels = testkit::alternating_labels(n);
    const auto a = assign_folds(testkit::numbered_ids(n), k, t, labels, t % 2 == 0);
    const auto sizes = a.fold_sizes();
    EXPECT_LE(*std::max_element(sizes.begin(), sizes.end()) - *std::min_element(sizes.begin(), sizes.end()), 1u);
    for (const auto& [_, f] : a.fold_of) EXPECT_LT(f, k);
  }
}

TEST(Folds, StratifiedBalancesClasses) {
  const auto labels = testkit::alternating_labels(100);
  const auto ids = testkit::numbered_ids(100);
  const auto a = assign_folds(ids, 10, 4, labels, true);
  std::vector<int> high(10, 0);
  for (std::size_t i = 0; i < 100; ++i) high[a.fold_of.at(ids[i])] += labels[i] == AlertLabel::kHighAlert;
  for (int h : high) EXPECT_EQ(h, 5);
}

TEST(Folds, Errors) {
  const auto ids = testkit::numbered_ids(5);
  EXPECT_EQ(error_code_of([&] { assign_folds(ids, 6, 1); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(error_code_of([&] { assign_folds(ids, 1, 1); }), ErrorCode::kInvalidArgument);
  const std::vector<std::string> dup{"a", "a", "b"};
  EXPECT_EQ(error_code_of([&] { assign_folds(dup, 2, 1); }), ErrorCode::kDuplicateId);
}

class CrossValidation : public ::testing::Test {
 protected:
  void SetUp() override {
    ids = testkit::numbered_ids(100);
    labels = testkit::alternating_labels(100);
    features = testkit::class_signal_text_features(labels, 48, 1.0);
  }
  std::vector<std::string> ids;
  std::vector<AlertLabel> labels;
  std::vector<EmbeddingVector> features;
};

TEST_F(CrossValidation, SeparableSvmTenFold) {
  const auto assignment = assign_folds(ids, 10, 42);
  const auto report = run_cross_validation(ids, features, labels, assignment, SvmConfig{});
  EXPECT_EQ(report.folds.size(), 10u);
  EXPECT_EQ(report.evaluated_folds, 10u);
  EXPECT_GE(report.mean_accuracy, 0.9);
  std::map<std::string, int> tested;
  double sum = 0;
  for (const auto& fold : report.folds) {
    for (const auto& id : fold.test_ids) tested[id]++;
    const double acc = *fold.metrics->accuracy;
    sum += acc;
    EXPECT_NEAR(acc * 10, std::round(acc * 10), 1e-12);
    EXPECT_GE(acc, report.min_accuracy);
    EXPECT_LE(acc, report.max_accuracy);
    EXPECT_EQ(fold.train_size, 90u);
  }
  EXPECT_EQ(tested.size(), 100u);
  for (const auto& [_, count] : tested) EXPECT_EQ(count, 1);
  EXPECT_DOUBLE_EQ(report.mean_accuracy, sum / 10);
}

TEST_F(CrossValidation, ParallelMatchesSerial) {
  const auto assignment = assign_folds(ids, 5, 7);
  const auto serial = run_cross_validation(ids, features, labels, assignment, SvmConfig{}, {1, false});
  const auto parallel = run_cross_validation(ids, features, labels, assignment, SvmConfig{}, {4, false});
  EXPECT_EQ(to_json(serial).dump(), to_json(parallel).dump());
}

TEST_F(CrossValidation, LabelFlipComplementsPredictions) {
  // Noisy data so fold accuracies are not all 1.
  const auto noisy = testkit::class_signal_text_features(labels, 48, 0.12);
  std::vector<AlertLabel> swapped;
  for (auto l : labels) swapped.push_back(flipped(l));
  const auto assignment = assign_folds(ids, 10, 3);
  const auto a = run_cross_validation(ids, noisy, labels, assignment, SvmConfig{});
  const auto b = run_cross_validation(ids, noisy, swapped, assignment, SvmConfig{});
  for (std::size_t f = 0; f < 10; ++f) {
    ASSERT_EQ(a.folds[f].predictions.size(), b.folds[f].predictions.size());
    for (std::size_t i = 0; i < a.folds[f].predictions.size(); ++i) {
      EXPECT_EQ(a.folds[f].predictions[i], flipped(b.folds[f].predictions[i]));
    }
    EXPECT_NEAR(*a.folds[f].metrics->accuracy, *b.folds[f].metrics->accuracy, 1e-12);
  }
}

TEST_F(CrossValidation, MlpClassifierConfigRuns) {
  MlpConfig c;
  c.input_dim = 48;
  c.hidden_dims = {16};
  c.epochs = 15;
  const auto assignment = assign_folds(ids, 4, 2);
  const auto report = run_cross_validation(ids, features, labels, assignment, c, {2, true});
  EXPECT_EQ(report.evaluated_folds, 4u);
  for (const auto& fold : report.folds) ASSERT_TRUE(fold.artifact.has_value());
  EXPECT_GE(report.mean_accuracy, 0.9);
  c.head = MlpHead::kRegressor;
  EXPECT_EQ(error_code_of([&] { run_cross_validation(ids, features, labels, assignment, c); }), ErrorCode::kConfig);
}

TEST(CrossValidationDegenerate, SingleClassTrainingFoldSkipped) {
  // Each fold's training part is the other fold, which holds one class.
  const std::vector<std::string> ids{"a", "b", "c", "d"};
  const std::vector<AlertLabel> labels{AlertLabel::kHighAlert, AlertLabel::kHighAlert, AlertLabel::kNoAlert,
                                       AlertLabel::kNoAlert};
  const auto features = testkit::class_signal_text_features(labels, 8, 1.0);
  FoldAssignment assignment{2, {{"a", 0}, {"b", 0}, {"c", 1}, {"d", 1}}, 0, false};
  const auto report = run_cross_validation(ids, features, labels, assignment, SvmConfig{});
  EXPECT_EQ(report.evaluated_folds, 0u);
  for (const auto& fold : report.folds) {
    ASSERT_TRUE(fold.skipped_reason.has_value());
    EXPECT_FALSE(fold.metrics.has_value());
  }
  const auto csv = cross_validation_csv(report);
  EXPECT_NE(csv.find("single class"), std::string::npos);
}
