#pragma once

// Classification and regression metrics. HIGH_ALERT is the positive class;
// any 0/0 ratio evaluates to 0.

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include <json.hpp>

#include "vidrisk/dataset.hpp"
#include "vidrisk/error.hpp"

namespace vidrisk {

struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + fp + tn + fn; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

inline ConfusionMatrix confusion(std::span<const AlertLabel> truth, std::span<const AlertLabel> predicted) {
  if (truth.size() != predicted.size()) {
    fail(ErrorCode::kInvalidArgument, "confusion: label lists differ in length");
  }
  if (truth.empty()) fail(ErrorCode::kInvalidArgument, "confusion: no labels");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool actual = truth[i] == AlertLabel::kHighAlert;
    const bool guess = predicted[i] == AlertLabel::kHighAlert;
    if (actual && guess) ++cm.tp;
    else if (!actual && guess) ++cm.fp;
    else if (!actual && !guess) ++cm.tn;
    else ++cm.fn;
  }
  return cm;
}

namespace detail {

inline double ratio_or_zero(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

inline void require_nonempty(const ConfusionMatrix& cm) {
  if (cm.total() == 0) fail(ErrorCode::kInvalidArgument, "empty confusion matrix");
}

inline void require_pairs(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size()) fail(ErrorCode::kInvalidArgument, "prediction and target lengths differ");
  if (pred.empty()) fail(ErrorCode::kInvalidArgument, "no predictions");
}

}  // namespace detail

inline double accuracy(const ConfusionMatrix& cm) {
  detail::require_nonempty(cm);
  return static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
}

inline double precision(const ConfusionMatrix& cm) {
  detail::require_nonempty(cm);
  return detail::ratio_or_zero(static_cast<double>(cm.tp), static_cast<double>(cm.tp + cm.fp));
}

inline double recall(const ConfusionMatrix& cm) {
  detail::require_nonempty(cm);
  return detail::ratio_or_zero(static_cast<double>(cm.tp), static_cast<double>(cm.tp + cm.fn));
}

inline double f1(const ConfusionMatrix& cm) {
  const double p = precision(cm);
  const double r = recall(cm);
  return detail::ratio_or_zero(2.0 * p * r, p + r);
}

inline double mae(std::span<const double> pred, std::span<const double> truth) {
  detail::require_pairs(pred, truth);
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) sum += std::abs(pred[i] - truth[i]);
  return sum / static_cast<double>(pred.size());
}

inline double mse(std::span<const double> pred, std::span<const double> truth) {
  detail::require_pairs(pred, truth);
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - truth[i];
    sum += d * d;
  }
  return sum / static_cast<double>(pred.size());
}

/// Classification fields are set iff labels were evaluated, regression
/// fields iff scores were.
struct MetricsBundle {
  std::optional<double> accuracy;
  std::optional<double> f1;
  std::optional<double> mae;
  std::optional<double> mse;
  std::size_t n = 0;
  std::optional<ConfusionMatrix> confusion;

  friend bool operator==(const MetricsBundle&, const MetricsBundle&) = default;
};

inline MetricsBundle classification_metrics(std::span<const AlertLabel> truth,
                                            std::span<const AlertLabel> predicted) {
  MetricsBundle bundle;
  const auto cm = confusion(truth, predicted);
  bundle.n = truth.size();
  bundle.accuracy = vidrisk::accuracy(cm);
  bundle.f1 = vidrisk::f1(cm);
  bundle.confusion = cm;
  return bundle;
}

inline MetricsBundle regression_metrics(std::span<const double> predicted, std::span<const double> truth) {
  MetricsBundle bundle;
  bundle.n = truth.size();
  bundle.mae = vidrisk::mae(predicted, truth);
  bundle.mse = vidrisk::mse(predicted, truth);
  return bundle;
}

inline void to_json(nlohmann::json& j, const ConfusionMatrix& cm) {
  j = {{"tp", cm.tp}, {"fp", cm.fp}, {"tn", cm.tn}, {"fn", cm.fn}};
}

inline void from_json(const nlohmann::json& j, ConfusionMatrix& cm) {
  cm.tp = j.at("tp").get<std::uint64_t>();
  cm.fp = j.at("fp").get<std::uint64_t>();
  cm.tn = j.at("tn").get<std::uint64_t>();
  cm.fn = j.at("fn").get<std::uint64_t>();
}

inline void to_json(nlohmann::json& j, const MetricsBundle& b) {
  j = nlohmann::json::object();
  j["n"] = b.n;
  if (b.accuracy) j["accuracy"] = *b.accuracy;
  if (b.f1) {
    j["f1"] = *b.f1;
    j["f1_zero_division"] = 0.0;
  }
  if (b.mae) j["mae"] = *b.mae;
  if (b.mse) j["mse"] = *b.mse;
  if (b.confusion) j["confusion"] = *b.confusion;
}

inline void from_json(const nlohmann::json& j, MetricsBundle& b) {
  b = {};
  b.n = j.at("n").get<std::size_t>();
  if (j.contains("accuracy")) b.accuracy = j.at("accuracy").get<double>();
  if (j.contains("f1")) b.f1 = j.at("f1").get<double>();
  if (j.contains("mae")) b.mae = j.at("mae").get<double>();
  if (j.contains("mse")) b.mse = j.at("mse").get<double>();
  if (j.contains("confusion")) b.confusion = j.at("confusion").get<ConfusionMatrix>();
}

inline std::string confusion_csv(const ConfusionMatrix& cm) {
  return "actual,predicted_high_alert,predicted_no_alert\n"
         "HIGH_ALERT," + std::to_string(cm.tp) + "," + std::to_string(cm.fn) + "\n"
         "NO_ALERT," + std::to_string(cm.fp) + "," + std::to_string(cm.tn) + "\n";
}

}  // namespace vidrisk
