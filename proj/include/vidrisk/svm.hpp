#pragma once

// Binary C-SVM trained with an SMO dual solver using second-order working
// set selection (Fan, Chen & Lin, JMLR 2005). The full kernel matrix is
// precomputed, which suits the few-hundred-sample datasets this targets.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "vidrisk/dataset.hpp"
#include "vidrisk/embedding.hpp"
#include "vidrisk/error.hpp"

namespace vidrisk {

enum class SvmKernel { kRbf, kLinear };

inline constexpr std::string_view to_string(SvmKernel k) {
  return k == SvmKernel::kRbf ? "RBF" : "LINEAR";
}

inline SvmKernel svm_kernel_from_string(std::string_view name) {
  if (name == "RBF" || name == "rbf") return SvmKernel::kRbf;
  if (name == "LINEAR" || name == "linear") return SvmKernel::kLinear;
  fail(ErrorCode::kParse, "unknown SVM kernel '" + std::string(name) + "'");
}

struct SvmConfig {
  SvmKernel kernel = SvmKernel::kRbf;
  double regularization_c = 1.0;
  /// RBF gamma in exp(-gamma * |x - y|^2). Unset means auto:
  /// 1 / (dim * variance of all feature values).
  std::optional<double> kernel_width;
  std::uint64_t seed = 0;
  double tolerance = 1e-3;
  std::size_t max_iterations = 1'000'000;

  void validate() const {
    auto bad = [](const std::string& what) { fail(ErrorCode::kConfig, "SVM config: " + what); };
    if (!(regularization_c > 0.0) || !std::isfinite(regularization_c)) {
      bad("regularization_c must be positive");
    }
    if (kernel_width && !(*kernel_width > 0.0)) bad("kernel_width must be positive or auto");
    if (!(tolerance > 0.0)) bad("tolerance must be positive");
    if (max_iterations == 0) bad("max_iterations must be positive");
  }

  friend bool operator==(const SvmConfig&, const SvmConfig&) = default;
};

inline void to_json(nlohmann::json& j, const SvmConfig& c) {
  j = {{"kernel", to_string(c.kernel)},
       {"regularization_c", c.regularization_c},
       {"kernel_width", c.kernel_width ? nlohmann::json(*c.kernel_width) : nlohmann::json("auto")},
       {"seed", c.seed},
       {"tolerance", c.tolerance},
       {"max_iterations", c.max_iterations}};
}

inline void from_json(const nlohmann::json& j, SvmConfig& c) {
  SvmConfig d;
  c.kernel = svm_kernel_from_string(j.value("kernel", std::string(to_string(d.kernel))));
  c.regularization_c = j.value("regularization_c", d.regularization_c);
  c.kernel_width.reset();
  if (j.contains("kernel_width")) {
    const auto& w = j.at("kernel_width");
    if (w.is_number()) {
      c.kernel_width = w.get<double>();
    } else if (!(w.is_string() && w.get<std::string>() == "auto") && !w.is_null()) {
      fail(ErrorCode::kParse, "kernel_width must be a positive number or \"auto\"");
    }
  }
  c.seed = j.value("seed", d.seed);
  c.tolerance = j.value("tolerance", d.tolerance);
  c.max_iterations = j.value("max_iterations", d.max_iterations);
}

struct SvmModel {
  SvmConfig config;
  double gamma = 1.0;  // resolved kernel width; unused for LINEAR
  std::size_t dim = 0;
  std::vector<float> support_vectors;  // rows of length dim
  std::vector<float> coefficients;     // alpha_i * y_i per support vector
  float bias = 0.0f;
  EmbeddingKind feature_kind = EmbeddingKind::kText;
  std::size_t iterations = 0;

  std::size_t support_count() const { return coefficients.size(); }

  double kernel(std::span<const float> a, std::span<const float> b) const {
    double acc = 0.0;
    if (config.kernel == SvmKernel::kLinear) {
      for (std::size_t k = 0; k < a.size(); ++k) acc += static_cast<double>(a[k]) * b[k];
      return acc;
    }
    for (std::size_t k = 0; k < a.size(); ++k) {
      const double d = static_cast<double>(a[k]) - b[k];
      acc += d * d;
    }
    return std::exp(-gamma * acc);
  }

  /// Positive side is HIGH_ALERT.
  double decision(std::span<const float> x) const {
    if (x.size() != dim) {
      fail(ErrorCode::kDimensionMismatch, "feature dim " + std::to_string(x.size()) +
                                              " does not match SVM dim " + std::to_string(dim));
    }
    double f = bias;
    for (std::size_t s = 0; s < coefficients.size(); ++s) {
      f += coefficients[s] * kernel(std::span(support_vectors).subspan(s * dim, dim), x);
    }
    return f;
  }

  friend bool operator==(const SvmModel&, const SvmModel&) = default;
};

inline double auto_kernel_width(std::span<const EmbeddingVector> features) {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t count = 0;
  for (const auto& f : features) {
    for (float v : f.values()) {
      sum += v;
      sum_sq += static_cast<double>(v) * v;
      ++count;
    }
  }
  const double mean = sum / static_cast<double>(count);
  const double var = sum_sq / static_cast<double>(count) - mean * mean;
  const double dim = static_cast<double>(features.front().dim());
  return var > 0.0 ? 1.0 / (dim * var) : 1.0;
}

inline SvmModel fit_svm(std::span<const EmbeddingVector> features, std::span<const AlertLabel> labels,
                        const SvmConfig& config) {
  config.validate();
  const std::size_t n = features.size();
  if (n == 0) fail(ErrorCode::kInvalidArgument, "no training samples");
  if (labels.size() != n) fail(ErrorCode::kInvalidArgument, "labels are not aligned with features");
  const std::size_t dim = features.front().dim();
  for (const auto& f : features) {
    if (f.dim() != dim) fail(ErrorCode::kDimensionMismatch, "SVM training features differ in dim");
    if (f.kind() != features.front().kind()) {
      fail(ErrorCode::kKindMismatch, "SVM training features mix embedding kinds");
    }
  }
  std::vector<double> y(n);
  std::size_t positives = 0;
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = labels[i] == AlertLabel::kHighAlert ? 1.0 : -1.0;
    positives += y[i] > 0;
  }
  if (positives == 0 || positives == n) {
    fail(ErrorCode::kSingleClass, "SVM training data holds a single class");
  }

  SvmModel model;
  model.config = config;
  model.dim = dim;
  model.feature_kind = features.front().kind();
  model.gamma = config.kernel == SvmKernel::kRbf
                    ? config.kernel_width.value_or(auto_kernel_width(features))
                    : 0.0;

  std::vector<double> kmat(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double k = model.kernel(features[i].values(), features[j].values());
      kmat[i * n + j] = k;
      kmat[j * n + i] = k;
    }
  }
  auto q = [&](std::size_t i, std::size_t j) { return y[i] * y[j] * kmat[i * n + j]; };

  const double c = config.regularization_c;
  constexpr double kTau = 1e-12;
  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);
  auto upper = [&](std::size_t t) { return alpha[t] >= c; };
  auto lower = [&](std::size_t t) { return alpha[t] <= 0.0; };

  std::size_t iter = 0;
  for (;; ++iter) {
    if (iter >= config.max_iterations) {
      fail(ErrorCode::kNonConvergence, "SMO did not converge within " +
                                           std::to_string(config.max_iterations) + " iterations");
    }
    double g_max = -std::numeric_limits<double>::infinity();
    std::ptrdiff_t i_sel = -1;
    for (std::size_t t = 0; t < n; ++t) {
      if (y[t] > 0) {
        if (!upper(t) && -grad[t] >= g_max) {
          g_max = -grad[t];
          i_sel = static_cast<std::ptrdiff_t>(t);
        }
      } else if (!lower(t) && grad[t] >= g_max) {
        g_max = grad[t];
        i_sel = static_cast<std::ptrdiff_t>(t);
      }
    }
    if (i_sel < 0) break;
    const auto i = static_cast<std::size_t>(i_sel);
    double g_max2 = -std::numeric_limits<double>::infinity();
    std::ptrdiff_t j_sel = -1;
    double best_obj = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      if (y[t] > 0) {
        if (lower(t)) continue;
        const double grad_diff = g_max + grad[t];
        if (grad[t] >= g_max2) g_max2 = grad[t];
        if (grad_diff > 0) {
          const double quad = kmat[i * n + i] + kmat[t * n + t] - 2.0 * y[i] * q(i, t);
          const double obj = -(grad_diff * grad_diff) / (quad > 0 ? quad : kTau);
          if (obj <= best_obj) {
            j_sel = static_cast<std::ptrdiff_t>(t);
            best_obj = obj;
          }
        }
      } else {
        if (upper(t)) continue;
        const double grad_diff = g_max - grad[t];
        if (-grad[t] >= g_max2) g_max2 = -grad[t];
        if (grad_diff > 0) {
          const double quad = kmat[i * n + i] + kmat[t * n + t] + 2.0 * y[i] * q(i, t);
          const double obj = -(grad_diff * grad_diff) / (quad > 0 ? quad : kTau);
          if (obj <= best_obj) {
            j_sel = static_cast<std::ptrdiff_t>(t);
            best_obj = obj;
          }
        }
      }
    }
    if (g_max + g_max2 < config.tolerance || j_sel < 0) break;
    const auto j = static_cast<std::size_t>(j_sel);

    const double old_ai = alpha[i];
    const double old_aj = alpha[j];
    const double qij = q(i, j);
    if (y[i] != y[j]) {
      double quad = kmat[i * n + i] + kmat[j * n + j] + 2.0 * qij;
      if (quad <= 0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) {
          alpha[j] = 0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = -diff;
      }
      if (diff > 0) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = c - diff;
        }
      } else if (alpha[j] > c) {
        alpha[j] = c;
        alpha[i] = c + diff;
      }
    } else {
      double quad = kmat[i * n + i] + kmat[j * n + j] - 2.0 * qij;
      if (quad <= 0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = sum - c;
        }
      } else if (alpha[j] < 0) {
        alpha[j] = 0;
        alpha[i] = sum;
      }
      if (sum > c) {
        if (alpha[j] > c) {
          alpha[j] = c;
          alpha[i] = sum - c;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = sum;
      }
    }
    const double dai = alpha[i] - old_ai;
    const double daj = alpha[j] - old_aj;
    for (std::size_t t = 0; t < n; ++t) grad[t] += q(t, i) * dai + q(t, j) * daj;
  }
  model.iterations = iter;

  // rho from the KKT conditions: average over free vectors, else the midpoint
  // of the feasible interval.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  std::size_t free_count = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (upper(t)) {
      if (y[t] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (lower(t)) {
      if (y[t] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      free_sum += yg;
      ++free_count;
    }
  }
  const double rho = free_count > 0 ? free_sum / static_cast<double>(free_count) : 0.5 * (ub + lb);
  model.bias = static_cast<float>(-rho);

  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] <= 0.0) continue;
    const auto values = features[t].values();
    model.support_vectors.insert(model.support_vectors.end(), values.begin(), values.end());
    model.coefficients.push_back(static_cast<float>(alpha[t] * y[t]));
  }
  return model;
}

}  // namespace vidrisk
