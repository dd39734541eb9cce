#include <gtest/gtest.h>

#include "support.hpp"
#include "vidrisk/models.hpp"
#include "vidrisk/svm.hpp"

using namespace vidrisk;
using vidrisk::testkit::error_code_of;

namespace {

struct Points {
  std::vector<EmbeddingVector> x;
  std::vector<AlertLabel> y;
};

Points xor_points() {
  Points p;
  for (auto [a, b, high] : {std::tuple{1.f, 1.f, true}, {-1.f, -1.f, true}, {1.f, -1.f, false}, {-1.f, 1.f, false}}) {
    p.x.emplace_back(EmbeddingKind::kText, std::vector<float>{a, b});
    p.y.push_back(high ? AlertLabel::kHighAlert : AlertLabel::kNoAlert);
  }
  return p;
}

Points clusters(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Points p;
  for (std::size_t i = 0; i < n; ++i) {
    const bool high = i % 2 == 0;
    const float c = high ? 3.0f : -3.0f;
    p.x.emplace_back(EmbeddingKind::kText,
                     std::vector<float>{c + static_cast<float>(rng.normal() * 0.5), c + static_cast<float>(rng.normal() * 0.5),
                                        static_cast<float>(rng.normal())});
    p.y.push_back(high ? AlertLabel::kHighAlert : AlertLabel::kNoAlert);
  }
  return p;
}

double accuracy_on(const TrainedModelArtifact& a, const Points& p) {
  std::vector<AlertLabel> pred;
  for (const auto& x : p.x) pred.push_back(svm_predict(a, x).label);
  return testkit::training_accuracy(p.y, pred);
}

SvmConfig config(SvmKernel kernel, std::optional<double> gamma = std::nullopt) {
  SvmConfig c;
  c.kernel = kernel;
  c.kernel_width = gamma;
  return c;
}

}  // namespace

TEST(Svm, SeparatedClustersFitPerfectly) {
  const auto p = clusters(40, 1);
  EXPECT_DOUBLE_EQ(accuracy_on(train_svm(p.x, p.y, config(SvmKernel::kRbf)), p), 1.0);
  EXPECT_DOUBLE_EQ(accuracy_on(train_svm(p.x, p.y, config(SvmKernel::kLinear)), p), 1.0);
}

TEST(Svm, LinearKernelCannotFitXor) {
  const auto p = xor_points();
  EXPECT_LE(accuracy_on(train_svm(p.x, p.y, config(SvmKernel::kLinear)), p), 0.75);
}

TEST(Svm, RbfKernelFitsXor) {
  const auto p = xor_points();
  EXPECT_DOUBLE_EQ(accuracy_on(train_svm(p.x, p.y, config(SvmKernel::kRbf, 2.0)), p), 1.0);
  EXPECT_DOUBLE_EQ(accuracy_on(train_svm(p.x, p.y, config(SvmKernel::kRbf)), p), 1.0);
}

TEST(Svm, SupportVectorsKeepTrainingLabels) {
  const auto p = clusters(40, 2);
  const auto artifact = train_svm(p.x, p.y, config(SvmKernel::kRbf));
  const auto& model = artifact.svm();
  ASSERT_GT(model.support_count(), 0u);
  for (std::size_t s = 0; s < model.support_count(); ++s) {
    const std::vector<float> sv(model.support_vectors.begin() + s * model.dim,
                                model.support_vectors.begin() + (s + 1) * model.dim);
    const auto label = svm_predict(artifact, EmbeddingVector(EmbeddingKind::kText, sv)).label;
    EXPECT_EQ(label, model.coefficients[s] > 0 ? AlertLabel::kHighAlert : AlertLabel::kNoAlert);
  }
}

TEST(Svm, LabelSwapFlipsDecisionSign) {
  const auto p = clusters(40, 3);
  auto swapped = p;
  for (auto& y : swapped.y) y = flipped(y);
  const auto a = train_svm(p.x, p.y, config(SvmKernel::kRbf));
  const auto b = train_svm(swapped.x, swapped.y, config(SvmKernel::kRbf));
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    const EmbeddingVector x(EmbeddingKind::kText, testkit::random_values(rng, 3, -4, 4));
    const double da = svm_predict(a, x).decision_value;
    const double db = svm_predict(b, x).decision_value;
    EXPECT_NEAR(da, -db, 1e-3);
  }
}

TEST(Svm, AutoWidthIsInverseDimTimesVariance) {
  std::vector<EmbeddingVector> x{EmbeddingVector(EmbeddingKind::kText, {0, 2}),
                                 EmbeddingVector(EmbeddingKind::kText, {4, 2})};
  // values {0,2,4,2}: mean 2, variance 2; dim 2.
  EXPECT_DOUBLE_EQ(auto_kernel_width(x), 1.0 / (2 * 2.0));
}

TEST(Svm, ErrorsAndValidation) {
  auto p = clusters(6, 5);
  std::fill(p.y.begin(), p.y.end(), AlertLabel::kNoAlert);
  EXPECT_EQ(error_code_of([&] { train_svm(p.x, p.y, config(SvmKernel::kRbf)); }), ErrorCode::kSingleClass);
  auto c = config(SvmKernel::kRbf);
  c.regularization_c = 0;
  EXPECT_EQ(error_code_of([&] { c.validate(); }), ErrorCode::kConfig);
  c = config(SvmKernel::kRbf, -1.0);
  EXPECT_EQ(error_code_of([&] { c.validate(); }), ErrorCode::kConfig);
  const auto q = clusters(10, 6);
  auto tiny = config(SvmKernel::kRbf);
  tiny.max_iterations = 1;
  tiny.tolerance = 1e-12;
  EXPECT_EQ(error_code_of([&] { train_svm(q.x, q.y, tiny); }), ErrorCode::kNonConvergence);
}

TEST(Svm, ConfigJsonRoundTrip) {
  auto c = config(SvmKernel::kLinear, 0.25);
  c.regularization_c = 3.5;
  EXPECT_EQ(nlohmann::json(c).get<SvmConfig>(), c);
  c.kernel_width.reset();
  EXPECT_EQ(nlohmann::json(c)["kernel_width"], "auto");
  EXPECT_EQ(nlohmann::json(c).get<SvmConfig>(), c);
}

TEST(Svm, DeterministicFit) {
  const auto p = clusters(30, 7);
  EXPECT_EQ(encode_artifact(train_svm(p.x, p.y, config(SvmKernel::kRbf))),
            encode_artifact(train_svm(p.x, p.y, config(SvmKernel::kRbf))));
}
