#pragma once

// Fully connected network with ReLU hidden layers and inverted dropout,
// trained with Adam. Two heads: a two-logit softmax classifier with
// cross-entropy loss, and a scalar regressor with mean squared error.
//
// The forward/backward kernels are templated on the scalar type so that the
// float training path and a double-precision gradient check share code.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "vidrisk/dataset.hpp"
#include "vidrisk/embedding.hpp"
#include "vidrisk/error.hpp"
#include "vidrisk/random.hpp"

namespace vidrisk {

enum class MlpHead { kBinaryClassifier, kRegressor };

inline constexpr std::string_view to_string(MlpHead head) {
  return head == MlpHead::kBinaryClassifier ? "BINARY_CLASSIFIER" : "REGRESSOR";
}

inline MlpHead mlp_head_from_string(std::string_view name) {
  if (name == "BINARY_CLASSIFIER" || name == "binary_classifier") return MlpHead::kBinaryClassifier;
  if (name == "REGRESSOR" || name == "regressor") return MlpHead::kRegressor;
  fail(ErrorCode::kParse, "unknown MLP head '" + std::string(name) + "'");
}

struct MlpConfig {
  std::size_t input_dim = 0;
  std::vector<std::size_t> hidden_dims{256, 64};
  double dropout_rate = 0.3;
  double learning_rate = 1e-3;
  std::size_t epochs = 100;
  std::size_t batch_size = 16;
  std::uint64_t seed = 0;
  MlpHead head = MlpHead::kBinaryClassifier;
  /// z-score inputs with training-set statistics stored in the model.
  bool standardize = true;
  /// 0 disables early stopping. Otherwise stop after this many epochs
  /// without the training loss improving by more than min_delta.
  std::size_t early_stopping_patience = 0;
  double early_stopping_min_delta = 0.0;

  std::size_t output_dim() const { return head == MlpHead::kBinaryClassifier ? 2 : 1; }

  /// Throws ErrorCode::kConfig on the first violated bound.
  void validate() const {
    auto bad = [](const std::string& what) { fail(ErrorCode::kConfig, "MLP config: " + what); };
    if (input_dim == 0) bad("input_dim must be positive");
    for (auto h : hidden_dims) {
      if (h == 0) bad("hidden_dims entries must be positive");
    }
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) bad("dropout_rate must lie in [0,1)");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) bad("learning_rate must be positive");
    if (epochs == 0) bad("epochs must be positive");
    if (batch_size == 0) bad("batch_size must be positive");
    if (early_stopping_min_delta < 0.0) bad("early_stopping_min_delta must be nonnegative");
  }

  friend bool operator==(const MlpConfig&, const MlpConfig&) = default;
};

inline void to_json(nlohmann::json& j, const MlpConfig& c) {
  j = {{"input_dim", c.input_dim},
       {"hidden_dims", c.hidden_dims},
       {"dropout_rate", c.dropout_rate},
       {"learning_rate", c.learning_rate},
       {"epochs", c.epochs},
       {"batch_size", c.batch_size},
       {"seed", c.seed},
       {"head", to_string(c.head)},
       {"standardize", c.standardize},
       {"early_stopping_patience", c.early_stopping_patience},
       {"early_stopping_min_delta", c.early_stopping_min_delta}};
}

inline void from_json(const nlohmann::json& j, MlpConfig& c) {
  MlpConfig d;
  c.input_dim = j.value("input_dim", d.input_dim);
  c.hidden_dims = j.value("hidden_dims", d.hidden_dims);
  c.dropout_rate = j.value("dropout_rate", d.dropout_rate);
  c.learning_rate = j.value("learning_rate", d.learning_rate);
  c.epochs = j.value("epochs", d.epochs);
  c.batch_size = j.value("batch_size", d.batch_size);
  c.seed = j.value("seed", d.seed);
  c.head = mlp_head_from_string(j.value("head", std::string(to_string(d.head))));
  c.standardize = j.value("standardize", d.standardize);
  c.early_stopping_patience = j.value("early_stopping_patience", d.early_stopping_patience);
  c.early_stopping_min_delta = j.value("early_stopping_min_delta", d.early_stopping_min_delta);
}

/// Layer widths from input to output. Parameters are stored flat, layer by
/// layer: weight [out x in] row-major, then bias [out].
class MlpShape {
 public:
  MlpShape() = default;
  explicit MlpShape(std::vector<std::size_t> widths) : widths_(std::move(widths)) {
    if (widths_.size() < 2) fail(ErrorCode::kInvalidArgument, "network needs input and output widths");
    std::size_t offset = 0;
    for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
      weight_offsets_.push_back(offset);
      offset += widths_[l + 1] * widths_[l];
      bias_offsets_.push_back(offset);
      offset += widths_[l + 1];
    }
    parameter_count_ = offset;
  }

  static MlpShape from_config(const MlpConfig& config) {
    std::vector<std::size_t> widths{config.input_dim};
    widths.insert(widths.end(), config.hidden_dims.begin(), config.hidden_dims.end());
    widths.push_back(config.output_dim());
    return MlpShape(std::move(widths));
  }

  std::size_t layers() const { return widths_.size() - 1; }
  std::size_t in_width(std::size_t layer) const { return widths_[layer]; }
  std::size_t out_width(std::size_t layer) const { return widths_[layer + 1]; }
  std::size_t input_dim() const { return widths_.front(); }
  std::size_t output_dim() const { return widths_.back(); }
  std::size_t weight_offset(std::size_t layer) const { return weight_offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const { return bias_offsets_[layer]; }
  std::size_t parameter_count() const { return parameter_count_; }
  const std::vector<std::size_t>& widths() const { return widths_; }

  friend bool operator==(const MlpShape& a, const MlpShape& b) { return a.widths_ == b.widths_; }

 private:
  std::vector<std::size_t> widths_;
  std::vector<std::size_t> weight_offsets_;
  std::vector<std::size_t> bias_offsets_;
  std::size_t parameter_count_ = 0;
};

/// Fan-in scaled uniform initialization: He-uniform for layers feeding a
/// ReLU, 1/sqrt(fan_in) for the output layer. Biases start at zero.
template <typename T>
std::vector<T> initialize_parameters(const MlpShape& shape, Rng& rng) {
  std::vector<T> params(shape.parameter_count(), T(0));
  for (std::size_t l = 0; l < shape.layers(); ++l) {
    const double fan_in = static_cast<double>(shape.in_width(l));
    const bool output_layer = l + 1 == shape.layers();
    const double limit = output_layer ? 1.0 / std::sqrt(fan_in) : std::sqrt(6.0 / fan_in);
    const std::size_t count = shape.out_width(l) * shape.in_width(l);
    for (std::size_t k = 0; k < count; ++k) {
      params[shape.weight_offset(l) + k] = static_cast<T>(rng.uniform(-limit, limit));
    }
  }
  return params;
}

namespace detail {

/// Activations kept for backprop. inputs[l] is the (post-dropout) input of
/// layer l; relu[l] is the pre-dropout ReLU output of hidden layer l.
template <typename T>
struct ForwardTrace {
  std::vector<std::vector<T>> inputs;
  std::vector<std::vector<T>> relu;
  std::vector<std::vector<T>> masks;
  std::vector<T> output;
};

template <typename T>
void dense(const MlpShape& shape, std::span<const T> params, std::size_t layer,
           std::span<const T> in, std::size_t rows, std::vector<T>& out) {
  const std::size_t n_in = shape.in_width(layer);
  const std::size_t n_out = shape.out_width(layer);
  const T* w = params.data() + shape.weight_offset(layer);
  const T* b = params.data() + shape.bias_offset(layer);
  out.assign(rows * n_out, T(0));
  for (std::size_t r = 0; r < rows; ++r) {
    const T* x = in.data() + r * n_in;
    T* y = out.data() + r * n_out;
    for (std::size_t o = 0; o < n_out; ++o) {
      const T* wo = w + o * n_in;
      T acc = b[o];
      for (std::size_t i = 0; i < n_in; ++i) acc += wo[i] * x[i];
      y[o] = acc;
    }
  }
}

/// Runs the network. With a dropout stream, hidden activations are masked
/// (keep probability 1-rate, survivors scaled by 1/(1-rate)).
template <typename T>
void forward(const MlpShape& shape, std::span<const T> params, std::span<const T> inputs,
             std::size_t rows, Rng* dropout_rng, double dropout_rate, ForwardTrace<T>& trace) {
  const std::size_t layers = shape.layers();
  trace.inputs.resize(layers);
  trace.relu.resize(layers);
  trace.masks.resize(layers);
  trace.inputs[0].assign(inputs.begin(), inputs.end());
  const bool dropout = dropout_rng != nullptr && dropout_rate > 0.0;
  const T keep_scale = dropout ? static_cast<T>(1.0 / (1.0 - dropout_rate)) : T(1);
  for (std::size_t l = 0; l < layers; ++l) {
    std::vector<T> z;
    dense<T>(shape, params, l, trace.inputs[l], rows, z);
    if (l + 1 == layers) {
      trace.output = std::move(z);
      break;
    }
    for (auto& v : z) v = v > T(0) ? v : T(0);
    trace.relu[l] = z;
    if (dropout) {
      auto& mask = trace.masks[l];
      mask.resize(z.size());
      for (std::size_t k = 0; k < z.size(); ++k) {
        mask[k] = dropout_rng->uniform() >= dropout_rate ? keep_scale : T(0);
        z[k] *= mask[k];
      }
    } else {
      trace.masks[l].clear();
    }
    trace.inputs[l + 1] = std::move(z);
  }
}

}  // namespace detail

/// Raw network outputs (logits or the regression value) for `rows` inputs,
/// dropout disabled.
template <typename T>
std::vector<T> mlp_forward(const MlpShape& shape, std::span<const T> params,
                           std::span<const T> inputs, std::size_t rows) {
  if (params.size() != shape.parameter_count()) {
    fail(ErrorCode::kDimensionMismatch, "parameter vector does not match network shape");
  }
  if (inputs.size() != rows * shape.input_dim()) {
    fail(ErrorCode::kDimensionMismatch, "input batch does not match network input width");
  }
  detail::ForwardTrace<T> trace;
  detail::forward<T>(shape, params, inputs, rows, nullptr, 0.0, trace);
  return std::move(trace.output);
}

/// Mean loss over the batch and its gradient with respect to every
/// parameter. Targets are class indices (0 = NO_ALERT, 1 = HIGH_ALERT) for the
/// classifier and real values for the regressor.
template <typename T>
T mlp_loss_and_gradient(const MlpShape& shape, MlpHead head, std::span<const T> params,
                        std::span<const T> inputs, std::span<const T> targets, std::size_t rows,
                        std::span<T> gradient, Rng* dropout_rng = nullptr,
                        double dropout_rate = 0.0) {
  detail::ForwardTrace<T> trace;
  detail::forward<T>(shape, params, inputs, rows, dropout_rng, dropout_rate, trace);
  std::fill(gradient.begin(), gradient.end(), T(0));

  const std::size_t n_out = shape.output_dim();
  const T inv_rows = T(1) / static_cast<T>(rows);
  std::vector<T> delta(rows * n_out);
  T loss = T(0);
  if (head == MlpHead::kBinaryClassifier) {
    for (std::size_t r = 0; r < rows; ++r) {
      const T l0 = trace.output[r * 2];
      const T l1 = trace.output[r * 2 + 1];
      const T m = std::max(l0, l1);
      const T e0 = std::exp(l0 - m);
      const T e1 = std::exp(l1 - m);
      const T log_z = m + std::log(e0 + e1);
      const bool positive = targets[r] > T(0.5);
      loss += log_z - (positive ? l1 : l0);
      const T p0 = e0 / (e0 + e1);
      const T p1 = e1 / (e0 + e1);
      delta[r * 2] = (p0 - (positive ? T(0) : T(1))) * inv_rows;
      delta[r * 2 + 1] = (p1 - (positive ? T(1) : T(0))) * inv_rows;
    }
  } else {
    for (std::size_t r = 0; r < rows; ++r) {
      const T diff = trace.output[r] - targets[r];
      loss += diff * diff;
      delta[r] = T(2) * diff * inv_rows;
    }
  }
  loss *= inv_rows;

  for (std::size_t l = shape.layers(); l-- > 0;) {
    const std::size_t n_in = shape.in_width(l);
    const std::size_t n_o = shape.out_width(l);
    const auto& x = trace.inputs[l];
    T* gw = gradient.data() + shape.weight_offset(l);
    T* gb = gradient.data() + shape.bias_offset(l);
    for (std::size_t r = 0; r < rows; ++r) {
      const T* xr = x.data() + r * n_in;
      const T* dr = delta.data() + r * n_o;
      for (std::size_t o = 0; o < n_o; ++o) {
        const T d = dr[o];
        gb[o] += d;
        if (d == T(0)) continue;
        T* gwo = gw + o * n_in;
        for (std::size_t i = 0; i < n_in; ++i) gwo[i] += d * xr[i];
      }
    }
    if (l == 0) break;
    // Propagate into layer l's input, then through dropout and ReLU of layer l-1.
    const T* w = params.data() + shape.weight_offset(l);
    std::vector<T> upstream(rows * n_in, T(0));
    for (std::size_t r = 0; r < rows; ++r) {
      const T* dr = delta.data() + r * n_o;
      T* ur = upstream.data() + r * n_in;
      for (std::size_t o = 0; o < n_o; ++o) {
        const T d = dr[o];
        if (d == T(0)) continue;
        const T* wo = w + o * n_in;
        for (std::size_t i = 0; i < n_in; ++i) ur[i] += d * wo[i];
      }
    }
    const auto& relu = trace.relu[l - 1];
    const auto& mask = trace.masks[l - 1];
    for (std::size_t k = 0; k < upstream.size(); ++k) {
      T g = upstream[k];
      if (!mask.empty()) g *= mask[k];
      upstream[k] = relu[k] > T(0) ? g : T(0);
    }
    delta = std::move(upstream);
  }
  return loss;
}

/// Trained network plus the input standardization it was fitted with.
struct MlpModel {
  MlpConfig config;
  MlpShape shape;
  std::vector<float> parameters;
  std::vector<float> input_shift;  // empty when standardization is off
  std::vector<float> input_scale;
  EmbeddingKind feature_kind = EmbeddingKind::kFused;

  void prepare_input(std::span<const float> raw, std::span<float> out) const {
    if (input_shift.empty()) {
      std::copy(raw.begin(), raw.end(), out.begin());
      return;
    }
    for (std::size_t j = 0; j < raw.size(); ++j) out[j] = (raw[j] - input_shift[j]) * input_scale[j];
  }

  std::vector<float> raw_output(std::span<const float> feature) const {
    if (feature.size() != shape.input_dim()) {
      fail(ErrorCode::kDimensionMismatch, "feature dim " + std::to_string(feature.size()) +
                                              " does not match model input " +
                                              std::to_string(shape.input_dim()));
    }
    std::vector<float> x(feature.size());
    prepare_input(feature, x);
    return mlp_forward<float>(shape, parameters, x, 1);
  }

  friend bool operator==(const MlpModel&, const MlpModel&) = default;
};

struct TrainingLog {
  std::vector<double> epoch_losses;
  double final_train_loss = 0.0;
  double wall_clock_seconds = 0.0;
  std::uint64_t seed = 0;
  bool stopped_early = false;
};

inline nlohmann::json to_json(const TrainingLog& log) {
  return {{"epoch_losses", log.epoch_losses},
          {"final_train_loss", log.final_train_loss},
          {"wall_clock_seconds", log.wall_clock_seconds},
          {"seed", log.seed},
          {"stopped_early", log.stopped_early}};
}

namespace detail {

struct AdamState {
  explicit AdamState(std::size_t n) : m(n, 0.0f), v(n, 0.0f) {}

  void step(std::span<float> params, std::span<const float> grad, double lr) {
    ++t;
    const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t));
    const float step_size = static_cast<float>(lr * std::sqrt(c2) / c1);
    const float eps_hat = static_cast<float>(kEps * std::sqrt(c2));
    for (std::size_t k = 0; k < params.size(); ++k) {
      m[k] = kBeta1f * m[k] + (1.0f - kBeta1f) * grad[k];
      v[k] = kBeta2f * v[k] + (1.0f - kBeta2f) * grad[k] * grad[k];
      params[k] -= step_size * m[k] / (std::sqrt(v[k]) + eps_hat);
    }
  }

  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;
  static constexpr float kBeta1f = 0.9f;
  static constexpr float kBeta2f = 0.999f;

  std::vector<float> m;
  std::vector<float> v;
  std::uint64_t t = 0;
};

inline void check_features(std::span<const EmbeddingVector> features, std::size_t expected_dim) {
  if (features.empty()) fail(ErrorCode::kInvalidArgument, "no training samples");
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].dim() != expected_dim) {
      fail(ErrorCode::kDimensionMismatch, "sample " + std::to_string(i) + " has dim " +
                                              std::to_string(features[i].dim()) + ", expected " +
                                              std::to_string(expected_dim));
    }
    if (features[i].kind() != features.front().kind()) {
      fail(ErrorCode::kKindMismatch, "training features mix embedding kinds");
    }
  }
}

}  // namespace detail

/// Fits an MLP. Targets follow mlp_loss_and_gradient's convention. Training
/// is single-threaded and bitwise deterministic in (data, config).
inline std::pair<MlpModel, TrainingLog> fit_mlp(std::span<const EmbeddingVector> features,
                                                std::span<const float> targets,
                                                const MlpConfig& config) {
  config.validate();
  detail::check_features(features, config.input_dim);
  if (targets.size() != features.size()) {
    fail(ErrorCode::kInvalidArgument, "targets are not aligned with features");
  }
  const auto started = std::chrono::steady_clock::now();
  const std::size_t n = features.size();
  const std::size_t dim = config.input_dim;

  MlpModel model;
  model.config = config;
  model.shape = MlpShape::from_config(config);
  model.feature_kind = features.front().kind();

  if (config.standardize) {
    model.input_shift.assign(dim, 0.0f);
    model.input_scale.assign(dim, 1.0f);
    for (std::size_t j = 0; j < dim; ++j) {
      double mean = 0.0;
      for (const auto& f : features) mean += f[j];
      mean /= static_cast<double>(n);
      double var = 0.0;
      for (const auto& f : features) var += (f[j] - mean) * (f[j] - mean);
      var /= static_cast<double>(n);
      const double sd = std::sqrt(var);
      model.input_shift[j] = static_cast<float>(mean);
      model.input_scale[j] = sd > 1e-12 ? static_cast<float>(1.0 / sd) : 1.0f;
    }
  }
  std::vector<float> inputs(n * dim);
  for (std::size_t i = 0; i < n; ++i) {
    model.prepare_input(features[i].values(), std::span(inputs).subspan(i * dim, dim));
  }

  Rng init_rng(derive_seed(config.seed, 1));
  Rng shuffle_rng(derive_seed(config.seed, 2));
  Rng dropout_rng(derive_seed(config.seed, 3));
  model.parameters = initialize_parameters<float>(model.shape, init_rng);
  if (config.head == MlpHead::kRegressor) {
    // Start the output at the target mean so the optimizer only fits the
    // residual structure.
    double mean = 0.0;
    for (float t : targets) mean += t;
    model.parameters[model.shape.bias_offset(model.shape.layers() - 1)] =
        static_cast<float>(mean / static_cast<double>(n));
  }

  detail::AdamState adam(model.parameters.size());
  std::vector<float> gradient(model.parameters.size());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<float> batch_x;
  std::vector<float> batch_t;

  TrainingLog log;
  log.seed = config.seed;
  double best_loss = std::numeric_limits<double>::infinity();
  std::size_t stale_epochs = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_rng.shuffle(std::span(order));
    double epoch_loss = 0.0;
    for (std::size_t begin = 0; begin < n; begin += config.batch_size) {
      const std::size_t rows = std::min(config.batch_size, n - begin);
      batch_x.resize(rows * dim);
      batch_t.resize(rows);
      for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t src = order[begin + r];
        std::copy_n(inputs.begin() + static_cast<std::ptrdiff_t>(src * dim), dim,
                    batch_x.begin() + static_cast<std::ptrdiff_t>(r * dim));
        batch_t[r] = targets[src];
      }
      const float loss = mlp_loss_and_gradient<float>(
          model.shape, config.head, model.parameters, batch_x, batch_t, rows, gradient,
          &dropout_rng, config.dropout_rate);
      if (!std::isfinite(loss)) {
        fail(ErrorCode::kNonFiniteLoss,
             "non-finite training loss at epoch " + std::to_string(epoch + 1));
      }
      epoch_loss += static_cast<double>(loss) * static_cast<double>(rows);
      adam.step(model.parameters, gradient, config.learning_rate);
    }
    epoch_loss /= static_cast<double>(n);
    log.epoch_losses.push_back(epoch_loss);
    if (config.early_stopping_patience > 0) {
      if (epoch_loss < best_loss - config.early_stopping_min_delta) {
        best_loss = epoch_loss;
        stale_epochs = 0;
      } else if (++stale_epochs >= config.early_stopping_patience) {
        log.stopped_early = true;
        break;
      }
    }
  }
  for (float p : model.parameters) {
    if (!std::isfinite(p)) {
      fail(ErrorCode::kNonFiniteLoss, "training diverged: non-finite parameters");
    }
  }
  log.final_train_loss = log.epoch_losses.back();
  log.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return {std::move(model), std::move(log)};
}

}  // namespace vidrisk
