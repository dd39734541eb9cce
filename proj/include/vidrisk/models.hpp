#pragma once

// The three prediction heads behind one artifact type, and the artifact
// file format.
//
// Artifact layout, little-endian:
//   "VMDL" | u16 format_version | u32 header_len | header (JSON, UTF-8)
//   | u32 array_count | arrays... | u32 CRC32 of every byte after the magic
// Each array: u16 name_len | name | u8 rank | u32 dims[rank] | float32 data.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "vidrisk/binary_io.hpp"
#include "vidrisk/dataset.hpp"
#include "vidrisk/embedding.hpp"
#include "vidrisk/error.hpp"
#include "vidrisk/mlp.hpp"
#include "vidrisk/svm.hpp"

namespace vidrisk {

enum class ModelKind { kMlpBinary, kMlpRegressor, kSvm };

inline constexpr std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kMlpBinary: return "MLP_BINARY";
    case ModelKind::kMlpRegressor: return "MLP_REGRESSOR";
    case ModelKind::kSvm: return "SVM";
  }
  return "UNKNOWN";
}

inline ModelKind model_kind_from_string(std::string_view name) {
  for (auto k : {ModelKind::kMlpBinary, ModelKind::kMlpRegressor, ModelKind::kSvm}) {
    if (to_string(k) == name) return k;
  }
  fail(ErrorCode::kCorruptFile, "unknown model kind '" + std::string(name) + "'");
}

inline constexpr std::uint16_t kArtifactFormatVersion = 1;
inline constexpr char kArtifactMagic[4] = {'V', 'M', 'D', 'L'};

struct TrainedModelArtifact {
  std::variant<MlpModel, SvmModel> model;
  std::vector<BackendDescriptor> backends;
  PoolingMethod pooling = PoolingMethod::kMean;
  double threshold = kDefaultAlertThreshold;
  std::uint16_t format_version = kArtifactFormatVersion;

  ModelKind kind() const {
    if (const auto* m = std::get_if<MlpModel>(&model)) {
      return m->config.head == MlpHead::kBinaryClassifier ? ModelKind::kMlpBinary
                                                           : ModelKind::kMlpRegressor;
    }
    return ModelKind::kSvm;
  }

  const MlpModel& mlp() const {
    if (const auto* m = std::get_if<MlpModel>(&model)) return *m;
    fail(ErrorCode::kKindMismatch, "artifact holds an SVM, not an MLP");
  }

  const SvmModel& svm() const {
    if (const auto* m = std::get_if<SvmModel>(&model)) return *m;
    fail(ErrorCode::kKindMismatch, "artifact holds an MLP, not an SVM");
  }

  EmbeddingKind feature_kind() const {
    return std::visit([](const auto& m) { return m.feature_kind; }, model);
  }

  std::size_t input_dim() const {
    if (const auto* m = std::get_if<MlpModel>(&model)) return m->shape.input_dim();
    return std::get<SvmModel>(model).dim;
  }

  nlohmann::json config_snapshot() const {
    return std::visit([](const auto& m) { return nlohmann::json(m.config); }, model);
  }

  friend bool operator==(const TrainedModelArtifact&, const TrainedModelArtifact&) = default;
};

namespace detail {

template <typename Model>
TrainedModelArtifact wrap(Model model) {
  TrainedModelArtifact artifact;
  artifact.model = std::move(model);
  return artifact;
}

inline void require_kind(const TrainedModelArtifact& artifact, ModelKind expected) {
  if (artifact.kind() != expected) {
    fail(ErrorCode::kKindMismatch, "expected a " + std::string(to_string(expected)) +
                                       " artifact, got " + std::string(to_string(artifact.kind())));
  }
}

inline void require_feature(const TrainedModelArtifact& artifact, const EmbeddingVector& feature) {
  if (feature.dim() != artifact.input_dim()) {
    fail(ErrorCode::kDimensionMismatch, "feature dim " + std::to_string(feature.dim()) +
                                            " does not match model input " +
                                            std::to_string(artifact.input_dim()));
  }
  if (feature.kind() != artifact.feature_kind()) {
    fail(ErrorCode::kKindMismatch, "model expects " + std::string(to_string(artifact.feature_kind())) +
                                       " features, got " + std::string(to_string(feature.kind())));
  }
}

inline void require_both_classes(std::span<const AlertLabel> labels) {
  const auto high = std::count(labels.begin(), labels.end(), AlertLabel::kHighAlert);
  if (high == 0 || static_cast<std::size_t>(high) == labels.size()) {
    fail(ErrorCode::kSingleClass, "training labels hold a single class");
  }
}

}  // namespace detail

inline std::pair<TrainedModelArtifact, TrainingLog> train_binary_classifier(
    std::span<const EmbeddingVector> features, std::span<const AlertLabel> labels,
    const MlpConfig& config) {
  if (config.head != MlpHead::kBinaryClassifier) {
    fail(ErrorCode::kConfig, "train_binary_classifier needs a BINARY_CLASSIFIER head");
  }
  config.validate();
  if (labels.size() != features.size()) {
    fail(ErrorCode::kInvalidArgument, "labels are not aligned with features");
  }
  detail::check_features(features, config.input_dim);
  detail::require_both_classes(labels);
  std::vector<float> targets(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    targets[i] = labels[i] == AlertLabel::kHighAlert ? 1.0f : 0.0f;
  }
  auto [model, log] = fit_mlp(features, targets, config);
  return {detail::wrap(std::move(model)), std::move(log)};
}

struct AlertPrediction {
  AlertLabel label = AlertLabel::kNoAlert;
  double probability = 0.0;  // of HIGH_ALERT
};

/// Two-logit softmax. Ties (probability exactly 0.5) go to HIGH_ALERT.
inline AlertPrediction alert_from_logits(double no_alert_logit, double high_alert_logit) {
  const double probability = 1.0 / (1.0 + std::exp(no_alert_logit - high_alert_logit));
  return {probability >= 0.5 ? AlertLabel::kHighAlert : AlertLabel::kNoAlert, probability};
}

inline AlertPrediction predict_alert(const TrainedModelArtifact& artifact, const EmbeddingVector& feature) {
  detail::require_kind(artifact, ModelKind::kMlpBinary);
  detail::require_feature(artifact, feature);
  const auto logits = artifact.mlp().raw_output(feature.values());
  return alert_from_logits(logits[0], logits[1]);
}

inline std::pair<TrainedModelArtifact, TrainingLog> train_regressor(
    std::span<const EmbeddingVector> features, std::span<const double> targets,
    const MlpConfig& config) {
  if (config.head != MlpHead::kRegressor) {
    fail(ErrorCode::kConfig, "train_regressor needs a REGRESSOR head");
  }
  config.validate();
  if (targets.size() != features.size()) {
    fail(ErrorCode::kInvalidArgument, "targets are not aligned with features");
  }
  std::vector<float> t(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (!(targets[i] >= kMinRating && targets[i] <= kMaxRating)) {
      fail(ErrorCode::kOutOfRange, "target " + std::to_string(i) + " (" +
                                       std::to_string(targets[i]) + ") outside [0,10]");
    }
    t[i] = static_cast<float>(targets[i]);
  }
  auto [model, log] = fit_mlp(features, t, config);
  return {detail::wrap(std::move(model)), std::move(log)};
}

inline double clamp_score(double raw) { return std::clamp(raw, kMinRating, kMaxRating); }

/// Unclamped regression output.
inline double raw_score(const TrainedModelArtifact& artifact, const EmbeddingVector& feature) {
  detail::require_kind(artifact, ModelKind::kMlpRegressor);
  detail::require_feature(artifact, feature);
  return artifact.mlp().raw_output(feature.values())[0];
}

inline double predict_score(const TrainedModelArtifact& artifact, const EmbeddingVector& feature) {
  const double raw = raw_score(artifact, feature);
  // NaN cannot come out of a finite network, but keep the range contract total.
  return std::isnan(raw) ? kMinRating : clamp_score(raw);
}

inline TrainedModelArtifact train_svm(std::span<const EmbeddingVector> features,
                                      std::span<const AlertLabel> labels, const SvmConfig& config) {
  return detail::wrap(fit_svm(features, labels, config));
}

struct SvmPrediction {
  AlertLabel label = AlertLabel::kNoAlert;
  double decision_value = 0.0;
};

inline SvmPrediction svm_predict(const TrainedModelArtifact& artifact, const EmbeddingVector& feature) {
  detail::require_kind(artifact, ModelKind::kSvm);
  detail::require_feature(artifact, feature);
  const double d = artifact.svm().decision(feature.values());
  return {d >= 0.0 ? AlertLabel::kHighAlert : AlertLabel::kNoAlert, d};
}

/// Label prediction for either classifier kind.
inline AlertLabel predict_label(const TrainedModelArtifact& artifact, const EmbeddingVector& feature) {
  switch (artifact.kind()) {
    case ModelKind::kMlpBinary: return predict_alert(artifact, feature).label;
    case ModelKind::kSvm: return svm_predict(artifact, feature).label;
    case ModelKind::kMlpRegressor: break;
  }
  fail(ErrorCode::kKindMismatch, "a regressor artifact does not predict labels");
}

// ---------------------------------------------------------------------------
// Serialization

struct NamedArray {
  std::string name;
  std::vector<std::uint32_t> shape;
  std::vector<float> data;
};

namespace detail {

inline std::vector<NamedArray> artifact_arrays(const TrainedModelArtifact& artifact) {
  std::vector<NamedArray> arrays;
  if (const auto* m = std::get_if<MlpModel>(&artifact.model)) {
    for (std::size_t l = 0; l < m->shape.layers(); ++l) {
      const auto out = static_cast<std::uint32_t>(m->shape.out_width(l));
      const auto in = static_cast<std::uint32_t>(m->shape.in_width(l));
      const auto w = m->parameters.begin() + static_cast<std::ptrdiff_t>(m->shape.weight_offset(l));
      const auto b = m->parameters.begin() + static_cast<std::ptrdiff_t>(m->shape.bias_offset(l));
      arrays.push_back({"layer" + std::to_string(l) + ".weight", {out, in},
                        std::vector<float>(w, w + static_cast<std::ptrdiff_t>(out) * in)});
      arrays.push_back({"layer" + std::to_string(l) + ".bias", {out}, std::vector<float>(b, b + out)});
    }
    if (!m->input_shift.empty()) {
      const auto dim = static_cast<std::uint32_t>(m->input_shift.size());
      arrays.push_back({"input.shift", {dim}, m->input_shift});
      arrays.push_back({"input.scale", {dim}, m->input_scale});
    }
  } else {
    const auto& s = std::get<SvmModel>(artifact.model);
    const auto count = static_cast<std::uint32_t>(s.support_count());
    arrays.push_back({"support_vectors", {count, static_cast<std::uint32_t>(s.dim)}, s.support_vectors});
    arrays.push_back({"coefficients", {count}, s.coefficients});
    arrays.push_back({"bias", {1}, {s.bias}});
  }
  return arrays;
}

inline nlohmann::json artifact_header(const TrainedModelArtifact& artifact) {
  nlohmann::json header = {
      {"model_kind", to_string(artifact.kind())},
      {"format_version", artifact.format_version},
      {"config", artifact.config_snapshot()},
      {"backends", artifact.backends},
      {"pooling", to_string(artifact.pooling)},
      {"threshold", artifact.threshold},
      {"feature_kind", to_string(artifact.feature_kind())},
      {"input_dim", artifact.input_dim()},
  };
  if (const auto* m = std::get_if<MlpModel>(&artifact.model)) {
    header["layer_widths"] = m->shape.widths();
    header["standardized"] = !m->input_shift.empty();
  } else {
    const auto& s = std::get<SvmModel>(artifact.model);
    header["gamma"] = s.gamma;
    header["support_count"] = s.support_count();
    header["iterations"] = s.iterations;
  }
  return header;
}

inline const NamedArray& find_array(const std::map<std::string, NamedArray>& arrays,
                                    const std::string& name, std::vector<std::uint32_t> shape) {
  const auto it = arrays.find(name);
  if (it == arrays.end()) fail(ErrorCode::kCorruptFile, "artifact is missing array '" + name + "'");
  if (it->second.shape != shape) fail(ErrorCode::kCorruptFile, "array '" + name + "' has the wrong shape");
  return it->second;
}

}  // namespace detail

inline std::vector<std::uint8_t> encode_artifact(const TrainedModelArtifact& artifact) {
  ByteWriter body;
  body.u16(artifact.format_version);
  const std::string header = detail::artifact_header(artifact).dump();
  body.u32(static_cast<std::uint32_t>(header.size()));
  body.raw(header);
  const auto arrays = detail::artifact_arrays(artifact);
  body.u32(static_cast<std::uint32_t>(arrays.size()));
  for (const auto& a : arrays) {
    body.u16(static_cast<std::uint16_t>(a.name.size()));
    body.raw(a.name);
    body.u8(static_cast<std::uint8_t>(a.shape.size()));
    for (auto d : a.shape) body.u32(d);
    for (float v : a.data) body.f32(v);
  }
  ByteWriter out;
  out.raw(std::string_view(kArtifactMagic, 4));
  out.raw(body.bytes());
  out.u32(crc32(body.bytes()));
  return out.take();
}

/// Errors: kCorruptFile for bad magic, truncation, checksum or structural
/// damage; kVersionMismatch for any format version other than the current one.
inline TrainedModelArtifact decode_artifact(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || !std::equal(kArtifactMagic, kArtifactMagic + 4, bytes.begin())) {
    fail(ErrorCode::kCorruptFile, "not a model artifact (bad magic)");
  }
  ByteReader reader(bytes.subspan(4), ErrorCode::kCorruptFile);
  const auto version = reader.u16();
  if (version != kArtifactFormatVersion) {
    fail(ErrorCode::kVersionMismatch, "artifact format version " + std::to_string(version) +
                                          " is not supported (expected " +
                                          std::to_string(kArtifactFormatVersion) + ")");
  }
  if (bytes.size() < 4 + 2 + 4) fail(ErrorCode::kCorruptFile, "artifact truncated");
  const auto body = bytes.subspan(4, bytes.size() - 8);
  const auto stored_crc = ByteReader(bytes.subspan(bytes.size() - 4)).u32();
  if (crc32(body) != stored_crc) fail(ErrorCode::kCorruptFile, "artifact checksum mismatch (truncated or damaged)");

  nlohmann::json header;
  std::map<std::string, NamedArray> arrays;
  try {
    ByteReader r(body.subspan(2), ErrorCode::kCorruptFile);
    const auto header_len = r.u32();
    const auto header_bytes = r.raw(header_len);
    header = nlohmann::json::parse(header_bytes.begin(), header_bytes.end());
    const auto count = r.u32();
    for (std::uint32_t a = 0; a < count; ++a) {
      NamedArray array;
      const auto name = r.raw(r.u16());
      array.name.assign(name.begin(), name.end());
      const auto rank = r.u8();
      std::uint64_t elements = 1;
      for (std::uint8_t d = 0; d < rank; ++d) {
        array.shape.push_back(r.u32());
        elements *= array.shape.back();
      }
      if (elements * 4 > r.remaining()) fail(ErrorCode::kCorruptFile, "array '" + array.name + "' overruns file");
      array.data.resize(static_cast<std::size_t>(elements));
      for (auto& v : array.data) v = r.f32();
      arrays.emplace(array.name, std::move(array));
    }
    if (r.remaining() != 0) fail(ErrorCode::kCorruptFile, "trailing bytes in artifact");
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kCorruptFile, std::string("artifact header unreadable: ") + e.what());
  }

  TrainedModelArtifact artifact;
  try {
    if (header.at("format_version").get<std::uint16_t>() != version) {
      fail(ErrorCode::kCorruptFile, "header format_version disagrees with file version");
    }
    const auto kind = model_kind_from_string(header.at("model_kind").get<std::string>());
    artifact.backends = header.at("backends").get<std::vector<BackendDescriptor>>();
    artifact.pooling = pooling_from_string(header.at("pooling").get<std::string>());
    artifact.threshold = header.at("threshold").get<double>();
    const auto feature_kind = embedding_kind_from_string(header.at("feature_kind").get<std::string>());
    const auto input_dim = header.at("input_dim").get<std::uint32_t>();
    if (kind == ModelKind::kSvm) {
      SvmModel svm;
      svm.config = header.at("config").get<SvmConfig>();
      svm.gamma = header.at("gamma").get<double>();
      svm.dim = input_dim;
      svm.feature_kind = feature_kind;
      svm.iterations = header.at("iterations").get<std::size_t>();
      const auto count = header.at("support_count").get<std::uint32_t>();
      svm.support_vectors = detail::find_array(arrays, "support_vectors", {count, input_dim}).data;
      svm.coefficients = detail::find_array(arrays, "coefficients", {count}).data;
      svm.bias = detail::find_array(arrays, "bias", {1}).data[0];
      artifact.model = std::move(svm);
    } else {
      MlpModel mlp;
      mlp.config = header.at("config").get<MlpConfig>();
      mlp.shape = MlpShape(header.at("layer_widths").get<std::vector<std::size_t>>());
      if (!(mlp.shape == MlpShape::from_config(mlp.config))) {
        fail(ErrorCode::kCorruptFile, "layer widths disagree with the config snapshot");
      }
      if ((kind == ModelKind::kMlpBinary) != (mlp.config.head == MlpHead::kBinaryClassifier)) {
        fail(ErrorCode::kCorruptFile, "model_kind disagrees with the config head");
      }
      mlp.feature_kind = feature_kind;
      mlp.parameters.resize(mlp.shape.parameter_count());
      for (std::size_t l = 0; l < mlp.shape.layers(); ++l) {
        const auto out = static_cast<std::uint32_t>(mlp.shape.out_width(l));
        const auto in = static_cast<std::uint32_t>(mlp.shape.in_width(l));
        const auto& w = detail::find_array(arrays, "layer" + std::to_string(l) + ".weight", {out, in});
        const auto& b = detail::find_array(arrays, "layer" + std::to_string(l) + ".bias", {out});
        std::copy(w.data.begin(), w.data.end(),
                  mlp.parameters.begin() + static_cast<std::ptrdiff_t>(mlp.shape.weight_offset(l)));
        std::copy(b.data.begin(), b.data.end(),
                  mlp.parameters.begin() + static_cast<std::ptrdiff_t>(mlp.shape.bias_offset(l)));
      }
      if (header.at("standardized").get<bool>()) {
        mlp.input_shift = detail::find_array(arrays, "input.shift", {input_dim}).data;
        mlp.input_scale = detail::find_array(arrays, "input.scale", {input_dim}).data;
      }
      artifact.model = std::move(mlp);
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kCorruptFile, std::string("artifact header invalid: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kCorruptFile) throw;
    fail(ErrorCode::kCorruptFile, std::string("artifact header invalid: ") + e.what());
  }
  return artifact;
}

inline void serialize_artifact(const TrainedModelArtifact& artifact, const std::filesystem::path& path) {
  write_file_bytes(path, encode_artifact(artifact));
}

inline TrainedModelArtifact deserialize_artifact(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return decode_artifact(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

}  // namespace vidrisk
