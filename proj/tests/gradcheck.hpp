#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "vidrisk/mlp.hpp"
#include "vidrisk/random.hpp"

namespace vidrisk::testkit {

struct GradientCheckResult {
  double max_relative_error = 0.0;
  std::size_t parameters = 0;
};

/// Compares analytic gradients against central differences for one random
/// network in double precision. Relative error per parameter is
/// |a - n| / max(|a|, |n|, 1e-6).
inline GradientCheckResult gradient_check(MlpHead head, std::uint64_t seed, std::size_t input_dim = 4,
                                          std::vector<std::size_t> hidden = {5, 3}, std::size_t batch = 8,
                                          double step = 1e-5) {
  MlpConfig config;
  config.input_dim = input_dim;
  config.hidden_dims = std::move(hidden);
  config.head = head;
  const auto shape = MlpShape::from_config(config);
  Rng rng(seed);
  auto params = initialize_parameters<double>(shape, rng);
  // Nonzero biases so that ReLU kinks are not sitting at exactly zero.
  for (std::size_t l = 0; l < shape.layers(); ++l) {
    for (std::size_t o = 0; o < shape.out_width(l); ++o) params[shape.bias_offset(l) + o] = rng.uniform(-0.5, 0.5);
  }
  std::vector<double> x(batch * input_dim);
  for (auto& v : x) v = rng.uniform(-2.0, 2.0);
  std::vector<double> t(batch);
  for (auto& v : t) v = head == MlpHead::kBinaryClassifier ? static_cast<double>(rng.below(2)) : rng.uniform(0, 10);

  std::vector<double> analytic(params.size());
  mlp_loss_and_gradient<double>(shape, head, params, x, t, batch, analytic);
  std::vector<double> scratch(params.size());
  GradientCheckResult result;
  result.parameters = params.size();
  for (std::size_t k = 0; k < params.size(); ++k) {
    const double saved = params[k];
    params[k] = saved + step;
    const double up = mlp_loss_and_gradient<double>(shape, head, params, x, t, batch, scratch);
    params[k] = saved - step;
    const double down = mlp_loss_and_gradient<double>(shape, head, params, x, t, batch, scratch);
    params[k] = saved;
    const double numeric = (up - down) / (2.0 * step);
    const double denom = std::max({std::fabs(analytic[k]), std::fabs(numeric), 1e-6});
    result.max_relative_error = std::max(result.max_relative_error, std::fabs(analytic[k] - numeric) / denom);
  }
  return result;
}

}  // namespace vidrisk::testkit
