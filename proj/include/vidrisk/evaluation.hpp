#pragma once

// Held-out evaluation of trained artifacts and seeded k-fold cross-validation.

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <variant>
#include <vector>

#include <json.hpp>

#include "vidrisk/dataset.hpp"
#include "vidrisk/embedding.hpp"
#include "vidrisk/error.hpp"
#include "vidrisk/metrics.hpp"
#include "vidrisk/models.hpp"
#include "vidrisk/parallel.hpp"
#include "vidrisk/random.hpp"

namespace vidrisk {

/// Held-out data for one artifact. Classifiers need labels, regressors need
/// scores.
struct EvaluationSet {
  std::vector<EmbeddingVector> features;
  std::vector<AlertLabel> labels;
  std::vector<double> scores;
};

inline MetricsBundle evaluate_framework(const TrainedModelArtifact& artifact, const EvaluationSet& set) {
  if (set.features.empty()) fail(ErrorCode::kInvalidArgument, "empty evaluation set");
  if (artifact.kind() == ModelKind::kMlpRegressor) {
    if (set.scores.size() != set.features.size()) {
      fail(ErrorCode::kKindMismatch, "regressor evaluation needs one target score per feature");
    }
    std::vector<double> predicted;
    predicted.reserve(set.features.size());
    for (const auto& f : set.features) predicted.push_back(predict_score(artifact, f));
    return regression_metrics(predicted, set.scores);
  }
  if (set.labels.size() != set.features.size()) {
    fail(ErrorCode::kKindMismatch, "classifier evaluation needs one label per feature");
  }
  std::vector<AlertLabel> predicted;
  predicted.reserve(set.features.size());
  for (const auto& f : set.features) predicted.push_back(predict_label(artifact, f));
  return classification_metrics(set.labels, predicted);
}

struct FoldAssignment {
  std::size_t k = 0;
  std::map<std::string, std::size_t> fold_of;
  std::uint64_t seed = 0;
  bool stratified = false;

  std::vector<std::size_t> fold_sizes() const {
    std::vector<std::size_t> sizes(k, 0);
    for (const auto& [_, f] : fold_of) ++sizes[f];
    return sizes;
  }

  friend bool operator==(const FoldAssignment&, const FoldAssignment&) = default;
};

/// Seeded shuffle, then round-robin. Stratified assignment shuffles each
/// class separately and deals the concatenation round-robin, so every fold
/// gets a near-equal share of both classes.
inline FoldAssignment assign_folds(std::span<const std::string> ids, std::size_t k, std::uint64_t seed,
                                   std::span<const AlertLabel> labels = {}, bool stratified = false) {
  if (k < 2) fail(ErrorCode::kInvalidArgument, "cross-validation needs k >= 2");
  if (k > ids.size()) {
    fail(ErrorCode::kInvalidArgument, "k = " + std::to_string(k) + " exceeds the " +
                                          std::to_string(ids.size()) + " available ids");
  }
  if (std::unordered_set<std::string>(ids.begin(), ids.end()).size() != ids.size()) {
    fail(ErrorCode::kDuplicateId, "fold ids must be unique");
  }
  if (stratified && labels.size() != ids.size()) {
    fail(ErrorCode::kInvalidArgument, "stratified folds need labels aligned with ids");
  }
  Rng rng(derive_seed(seed, 0xf01d));
  std::vector<std::size_t> order;
  if (stratified) {
    for (AlertLabel c : {AlertLabel::kNoAlert, AlertLabel::kHighAlert}) {
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < ids.size(); ++i) {
        if (labels[i] == c) members.push_back(i);
      }
      rng.shuffle(std::span(members));
      order.insert(order.end(), members.begin(), members.end());
    }
  } else {
    order.resize(ids.size());
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(std::span(order));
  }
  FoldAssignment assignment{k, {}, seed, stratified};
  for (std::size_t pos = 0; pos < order.size(); ++pos) assignment.fold_of[ids[order[pos]]] = pos % k;
  return assignment;
}

using ClassifierConfig = std::variant<SvmConfig, MlpConfig>;

struct FoldResult {
  std::size_t fold = 0;
  std::vector<std::string> test_ids;
  std::size_t train_size = 0;
  std::optional<MetricsBundle> metrics;
  std::optional<std::string> skipped_reason;
  std::vector<AlertLabel> predictions;  // aligned with test_ids
  std::optional<TrainedModelArtifact> artifact;
};

struct CrossValidationReport {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<FoldResult> folds;
  double mean_accuracy = 0.0;
  double min_accuracy = 0.0;
  double max_accuracy = 0.0;
  std::size_t evaluated_folds = 0;
};

struct CrossValidationOptions {
  std::size_t workers = 1;
  bool retain_artifacts = false;
};

/// Trains on every fold but one and tests on the held-out fold, k times.
/// Folds whose training part misses a class are reported as skipped.
inline CrossValidationReport run_cross_validation(std::span<const std::string> ids,
                                                  std::span<const EmbeddingVector> features,
                                                  std::span<const AlertLabel> labels,
                                                  const FoldAssignment& assignment,
                                                  const ClassifierConfig& model_config,
                                                  const CrossValidationOptions& options = {}) {
  if (ids.size() != features.size() || ids.size() != labels.size()) {
    fail(ErrorCode::kInvalidArgument, "ids, features and labels must be aligned");
  }
  if (assignment.fold_of.size() != ids.size()) {
    fail(ErrorCode::kInvalidArgument, "fold assignment does not cover exactly the given ids");
  }
  if (const auto* mlp = std::get_if<MlpConfig>(&model_config); mlp && mlp->head != MlpHead::kBinaryClassifier) {
    fail(ErrorCode::kConfig, "cross-validation runs classifiers only");
  }
  std::vector<std::size_t> fold_index(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto it = assignment.fold_of.find(ids[i]);
    if (it == assignment.fold_of.end()) {
      fail(ErrorCode::kInvalidArgument, "id '" + ids[i] + "' has no fold");
    }
    fold_index[i] = it->second;
  }

  CrossValidationReport report;
  report.k = assignment.k;
  report.seed = assignment.seed;
  report.folds.resize(assignment.k);
  parallel_for(assignment.k, options.workers, [&](std::size_t f) {
    FoldResult& result = report.folds[f];
    result.fold = f;
    std::vector<EmbeddingVector> train_x;
    std::vector<AlertLabel> train_y;
    EvaluationSet test;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (fold_index[i] == f) {
        result.test_ids.push_back(ids[i]);
        test.features.push_back(features[i]);
        test.labels.push_back(labels[i]);
      } else {
        train_x.push_back(features[i]);
        train_y.push_back(labels[i]);
      }
    }
    result.train_size = train_x.size();
    if (test.features.empty()) {
      result.skipped_reason = "empty test fold";
      return;
    }
    const auto high = std::count(train_y.begin(), train_y.end(), AlertLabel::kHighAlert);
    if (high == 0 || static_cast<std::size_t>(high) == train_y.size()) {
      result.skipped_reason = "training folds hold a single class";
      return;
    }
    TrainedModelArtifact artifact = std::visit(
        [&](const auto& config) -> TrainedModelArtifact {
          using C = std::decay_t<decltype(config)>;
          if constexpr (std::is_same_v<C, SvmConfig>) {
            return train_svm(train_x, train_y, config);
          } else {
            return train_binary_classifier(train_x, train_y, config).first;
          }
        },
        model_config);
    for (const auto& x : test.features) result.predictions.push_back(predict_label(artifact, x));
    result.metrics = classification_metrics(test.labels, result.predictions);
    if (options.retain_artifacts) result.artifact = std::move(artifact);
  });

  double sum = 0.0;
  for (const auto& fold : report.folds) {
    if (!fold.metrics) continue;
    const double acc = *fold.metrics->accuracy;
    if (report.evaluated_folds == 0) {
      report.min_accuracy = report.max_accuracy = acc;
    } else {
      report.min_accuracy = std::min(report.min_accuracy, acc);
      report.max_accuracy = std::max(report.max_accuracy, acc);
    }
    sum += acc;
    ++report.evaluated_folds;
  }
  report.mean_accuracy = report.evaluated_folds ? sum / static_cast<double>(report.evaluated_folds) : 0.0;
  return report;
}

inline nlohmann::json to_json(const CrossValidationReport& report) {
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& fold : report.folds) {
    nlohmann::json row = {{"fold", fold.fold}, {"test_ids", fold.test_ids}, {"train_size", fold.train_size}};
    if (fold.metrics) row["metrics"] = *fold.metrics;
    if (fold.skipped_reason) row["skipped"] = *fold.skipped_reason;
    folds.push_back(std::move(row));
  }
  return {{"k", report.k},
          {"seed", report.seed},
          {"folds", std::move(folds)},
          {"mean_accuracy", report.mean_accuracy},
          {"min_accuracy", report.min_accuracy},
          {"max_accuracy", report.max_accuracy},
          {"evaluated_folds", report.evaluated_folds}};
}

inline std::string cross_validation_csv(const CrossValidationReport& report) {
  std::string csv = "fold,n_test,n_train,accuracy,f1,tp,fp,tn,fn,skipped\n";
  for (const auto& fold : report.folds) {
    csv += std::to_string(fold.fold) + "," + std::to_string(fold.test_ids.size()) + "," +
           std::to_string(fold.train_size) + ",";
    if (fold.metrics) {
      const auto& m = *fold.metrics;
      const auto& cm = *m.confusion;
      csv += nlohmann::json(*m.accuracy).dump() + "," + nlohmann::json(*m.f1).dump() + "," +
             std::to_string(cm.tp) + "," + std::to_string(cm.fp) + "," + std::to_string(cm.tn) +
             "," + std::to_string(cm.fn) + ",";
    } else {
      csv += ",,,,,," + fold.skipped_reason.value_or("");
    }
    csv += "\n";
  }
  return csv;
}

}  // namespace vidrisk
