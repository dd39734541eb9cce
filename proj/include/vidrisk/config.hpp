#pragma once

// Declarative experiment configuration: parsing, validation and the three
// framework presets.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "vidrisk/binary_io.hpp"
#include "vidrisk/dataset.hpp"
#include "vidrisk/embedding.hpp"
#include "vidrisk/error.hpp"
#include "vidrisk/evaluation.hpp"
#include "vidrisk/frame_sampler.hpp"
#include "vidrisk/hashing.hpp"
#include "vidrisk/mlp.hpp"
#include "vidrisk/svm.hpp"

namespace vidrisk {

#ifdef VIDRISK_VERSION
inline constexpr std::string_view kToolVersion = VIDRISK_VERSION;
#else
inline constexpr std::string_view kToolVersion = "0.0.0";
#endif

enum class BackendType { kMock, kHttp };

struct BackendSpec {
  BackendType type = BackendType::kMock;
  std::string backend_id;
  std::size_t dim = 0;
  std::string version;
  bool serial = false;
  // mock
  std::uint64_t salt = 0;
  double class_signal = 0.0;
  // http
  std::string url;
  std::string credentials_env;
  int timeout_seconds = 30;

  friend bool operator==(const BackendSpec&, const BackendSpec&) = default;
};

enum class FeatureSet { kFused, kText, kVisual };

inline constexpr std::string_view to_string(FeatureSet f) {
  switch (f) {
    case FeatureSet::kFused: return "fused";
    case FeatureSet::kText: return "text";
    case FeatureSet::kVisual: return "visual";
  }
  return "fused";
}

inline EmbeddingKind feature_kind(FeatureSet f) {
  switch (f) {
    case FeatureSet::kFused: return EmbeddingKind::kFused;
    case FeatureSet::kText: return EmbeddingKind::kText;
    case FeatureSet::kVisual: return EmbeddingKind::kVideoPooled;
  }
  return EmbeddingKind::kFused;
}

enum class CvScope { kFull, kTrain };

struct SplitSpec {
  double test_fraction = 0.1;
  bool stratified = true;
  friend bool operator==(const SplitSpec&, const SplitSpec&) = default;
};

struct CvSpec {
  std::size_t k = 10;
  /// kFull folds the whole dataset; kTrain folds only the training part of a
  /// holdout split of `holdout_fraction`.
  CvScope scope = CvScope::kFull;
  bool stratified = false;
  bool retain_artifacts = false;
  double holdout_fraction = 0.1;
  friend bool operator==(const CvSpec&, const CvSpec&) = default;
};

using ModelSpec = std::variant<MlpConfig, SvmConfig>;

struct ExperimentConfig {
  std::string name;
  std::uint64_t seed = 42;
  std::string manifest_path;  // as written
  bool strict_manifest = true;
  std::size_t frame_count = kDefaultFrameCount;
  PoolingMethod pooling = PoolingMethod::kMean;
  double threshold = kDefaultAlertThreshold;
  RatingAggregation rating_aggregation = RatingAggregation::kMean;
  std::optional<SplitSpec> split;
  std::optional<CvSpec> cv;
  std::optional<BackendSpec> visual_backend;
  std::optional<BackendSpec> text_backend;
  FeatureSet features = FeatureSet::kFused;
  ModelSpec model = MlpConfig{};
  std::string output_dir = "runs/out";
  std::string cache_dir;  // empty: <output_dir>/cache
  std::size_t workers = 0;

  /// Directory that relative paths are resolved against (the config file's).
  std::filesystem::path base_dir;

  std::filesystem::path resolve(const std::string& p) const {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  }
  std::filesystem::path manifest_file() const { return resolve(manifest_path); }
  std::filesystem::path output_path() const { return resolve(output_dir); }
  std::filesystem::path cache_path() const {
    return cache_dir.empty() ? output_path() / "cache" : resolve(cache_dir);
  }
};

struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
  std::optional<std::size_t> workers;

  std::vector<std::string> describe() const {
    std::vector<std::string> out;
    if (seed) out.push_back("seed=" + std::to_string(*seed));
    if (output_dir) out.push_back("output_dir=" + *output_dir);
    if (workers) out.push_back("workers=" + std::to_string(*workers));
    return out;
  }
};

inline constexpr std::string_view to_string(BackendType t) { return t == BackendType::kMock ? "mock" : "http"; }

inline nlohmann::json to_json(const BackendSpec& b) {
  nlohmann::json j = {{"type", to_string(b.type)}, {"backend_id", b.backend_id}, {"dim", b.dim},
                      {"version", b.version},      {"serial", b.serial}};
  if (b.type == BackendType::kMock) {
    j["salt"] = b.salt;
    j["class_signal"] = b.class_signal;
  } else {
    j["url"] = b.url;
    j["credentials_env"] = b.credentials_env;
    j["timeout_seconds"] = b.timeout_seconds;
  }
  return j;
}

inline nlohmann::json model_json(const ModelSpec& model) {
  if (const auto* mlp = std::get_if<MlpConfig>(&model)) {
    nlohmann::json j = *mlp;
    j.erase("seed");
    j["type"] = "mlp";
    return j;
  }
  nlohmann::json j = std::get<SvmConfig>(model);
  j.erase("seed");
  j["type"] = "svm";
  return j;
}

/// Canonical form with every default spelled out. Key order is sorted, so
/// the dump is stable and hashable.
inline nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j = {
      {"name", c.name},
      {"seed", c.seed},
      {"manifest_path", c.manifest_path},
      {"strict_manifest", c.strict_manifest},
      {"frames", {{"count", c.frame_count}}},
      {"pooling", to_string(c.pooling)},
      {"threshold", c.threshold},
      {"rating_aggregation", c.rating_aggregation == RatingAggregation::kMean ? "mean" : "median"},
      {"features", to_string(c.features)},
      {"model", model_json(c.model)},
      {"output_dir", c.output_dir},
      {"workers", c.workers},
  };
  if (!c.cache_dir.empty()) j["cache_dir"] = c.cache_dir;
  if (c.split) j["split"] = {{"test_fraction", c.split->test_fraction}, {"stratified", c.split->stratified}};
  if (c.cv) {
    j["cv"] = {{"k", c.cv->k},
               {"scope", c.cv->scope == CvScope::kFull ? "full" : "train"},
               {"stratified", c.cv->stratified},
               {"retain_artifacts", c.cv->retain_artifacts},
               {"holdout_fraction", c.cv->holdout_fraction}};
  }
  nlohmann::json backends = nlohmann::json::object();
  if (c.visual_backend) backends["visual"] = to_json(*c.visual_backend);
  if (c.text_backend) backends["text"] = to_json(*c.text_backend);
  j["backends"] = backends;
  return j;
}

inline std::string config_hash(const ExperimentConfig& c) { return sha256_hex(to_json(c).dump()); }

struct ConfigValidation {
  std::optional<ExperimentConfig> config;
  std::vector<std::string> violations;
  std::vector<std::string> warnings;

  bool ok() const { return violations.empty() && config.has_value(); }
};

namespace detail {

class FieldReader {
 public:
  FieldReader(const nlohmann::json& object, std::string prefix, std::vector<std::string>& violations)
      : object_(object), prefix_(std::move(prefix)), violations_(violations) {}

  bool has(const char* key) const { return object_.contains(key); }

  template <typename T>
  T get(const char* key, T fallback) {
    seen_.insert(key);
    if (!object_.contains(key)) return fallback;
    try {
      return object_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      violations_.push_back(prefix_ + key + ": wrong type");
      return fallback;
    }
  }

  void known(std::initializer_list<const char*> keys) {
    for (auto k : keys) seen_.insert(k);
  }

  void reject_unknown() {
    for (const auto& [key, _] : object_.items()) {
      if (!seen_.count(key)) violations_.push_back(prefix_ + key + ": unknown key");
    }
  }

 private:
  const nlohmann::json& object_;
  std::string prefix_;
  std::vector<std::string>& violations_;
  std::set<std::string> seen_;
};

inline std::optional<BackendSpec> parse_backend(const nlohmann::json& j, const std::string& slot,
                                                std::vector<std::string>& v) {
  const std::string prefix = "backends." + slot + ".";
  if (!j.is_object()) {
    v.push_back(prefix + ": must be an object");
    return std::nullopt;
  }
  FieldReader r(j, prefix, v);
  BackendSpec b;
  const auto type = r.get<std::string>("type", "mock");
  if (type == "mock") {
    b.type = BackendType::kMock;
  } else if (type == "http") {
    b.type = BackendType::kHttp;
  } else {
    v.push_back(prefix + "type: unknown backend type '" + type + "' (mock | http)");
  }
  b.backend_id = r.get<std::string>("backend_id", "mock-" + slot);
  b.dim = r.get<std::size_t>("dim", 0);
  b.version = r.get<std::string>("version", "");
  b.serial = r.get<bool>("serial", false);
  b.salt = r.get<std::uint64_t>("salt", slot == "visual" ? 1 : 2);
  b.class_signal = r.get<double>("class_signal", 0.0);
  b.url = r.get<std::string>("url", "");
  b.credentials_env = r.get<std::string>("credentials_env", "");
  b.timeout_seconds = r.get<int>("timeout_seconds", 30);
  r.reject_unknown();
  if (b.dim == 0) v.push_back(prefix + "dim: must be a positive integer");
  if (b.backend_id.empty()) v.push_back(prefix + "backend_id: must be nonempty");
  if (!(b.class_signal >= 0.0)) v.push_back(prefix + "class_signal: must be nonnegative");
  if (b.type == BackendType::kHttp) {
    if (b.url.empty()) v.push_back(prefix + "url: required for http backends");
    if (b.class_signal != 0.0) v.push_back(prefix + "class_signal: only mock backends inject a synthetic signal");
    if (b.timeout_seconds <= 0) v.push_back(prefix + "timeout_seconds: must be positive");
  }
  return b;
}

inline ModelSpec parse_model(const nlohmann::json& j, std::vector<std::string>& v) {
  if (!j.is_object()) {
    v.push_back("model: must be an object");
    return MlpConfig{};
  }
  const std::string type = j.value("type", std::string("mlp"));
  if (j.contains("seed")) v.push_back("model.seed: the training seed is the top-level seed");
  if (type == "svm") {
    FieldReader r(j, "model.", v);
    r.known({"type", "seed", "kernel", "regularization_c", "kernel_width", "tolerance", "max_iterations"});
    r.reject_unknown();
    try {
      SvmConfig c = j.get<SvmConfig>();
      try {
        c.validate();
      } catch (const Error& e) {
        v.push_back(std::string("model: ") + e.what());
      }
      return c;
    } catch (const std::exception& e) {
      v.push_back(std::string("model: ") + e.what());
      return SvmConfig{};
    }
  }
  if (type != "mlp") v.push_back("model.type: unknown model type '" + type + "' (mlp | svm)");
  FieldReader r(j, "model.", v);
  r.known({"type", "seed", "input_dim", "hidden_dims", "dropout_rate", "learning_rate", "epochs",
           "batch_size", "head", "standardize", "early_stopping_patience", "early_stopping_min_delta"});
  r.reject_unknown();
  try {
    return j.get<MlpConfig>();
  } catch (const std::exception& e) {
    v.push_back(std::string("model: ") + e.what());
    return MlpConfig{};
  }
}

inline bool filename_safe(const std::string& id) {
  if (id.empty() || id == "." || id == "..") return false;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.';
    if (!ok) return false;
  }
  return true;
}

}  // namespace detail

/// Parses and validates a config document, collecting every violation
/// instead of stopping at the first.
inline ConfigValidation validate_config(const nlohmann::json& document, const std::filesystem::path& base_dir,
                                        const ConfigOverrides& overrides = {}) {
  ConfigValidation result;
  auto& v = result.violations;
  if (!document.is_object()) {
    v.push_back("config must be a JSON object");
    return result;
  }
  nlohmann::json doc = document;
  if (overrides.seed) doc["seed"] = *overrides.seed;
  if (overrides.output_dir) doc["output_dir"] = *overrides.output_dir;
  if (overrides.workers) doc["workers"] = *overrides.workers;

  ExperimentConfig c;
  c.base_dir = base_dir;
  detail::FieldReader r(doc, "", v);
  c.name = r.get<std::string>("name", "");
  c.seed = r.get<std::uint64_t>("seed", c.seed);
  c.manifest_path = r.get<std::string>("manifest_path", "");
  c.strict_manifest = r.get<bool>("strict_manifest", true);
  c.output_dir = r.get<std::string>("output_dir", c.output_dir);
  c.cache_dir = r.get<std::string>("cache_dir", "");
  c.workers = r.get<std::size_t>("workers", 0);
  c.threshold = r.get<double>("threshold", c.threshold);

  if (doc.contains("frames")) {
    const auto& frames = doc.at("frames");
    if (frames.is_object()) {
      detail::FieldReader fr(frames, "frames.", v);
      const auto count = fr.get<long long>("count", static_cast<long long>(kDefaultFrameCount));
      if (count < 1) v.push_back("frames.count: must be a positive integer");
      c.frame_count = count < 1 ? kDefaultFrameCount : static_cast<std::size_t>(count);
      fr.reject_unknown();
    } else {
      v.push_back("frames: must be an object");
    }
  }
  r.known({"frames"});

  const auto pooling = r.get<std::string>("pooling", "mean");
  if (pooling != "mean") v.push_back("pooling: unknown method '" + pooling + "' (mean)");
  const auto aggregation = r.get<std::string>("rating_aggregation", "mean");
  if (aggregation == "mean") {
    c.rating_aggregation = RatingAggregation::kMean;
  } else if (aggregation == "median") {
    c.rating_aggregation = RatingAggregation::kMedian;
  } else {
    v.push_back("rating_aggregation: unknown rule '" + aggregation + "' (mean | median)");
  }
  if (!(c.threshold >= kMinRating && c.threshold <= kMaxRating)) {
    v.push_back("threshold outside rating scale [0,10]");
  }

  const bool has_split = doc.contains("split");
  const bool has_cv = doc.contains("cv");
  r.known({"split", "cv", "backends", "model"});
  if (has_split && has_cv) v.push_back("both split and cv present; a run stage uses exactly one");
  if (!has_split && !has_cv) v.push_back("one of split or cv is required");
  if (has_split) {
    const auto& s = doc.at("split");
    if (s.is_object()) {
      detail::FieldReader sr(s, "split.", v);
      SplitSpec spec;
      spec.test_fraction = sr.get<double>("test_fraction", spec.test_fraction);
      spec.stratified = sr.get<bool>("stratified", spec.stratified);
      sr.reject_unknown();
      if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0)) {
        v.push_back("split.test_fraction: must lie in (0,1)");
      }
      c.split = spec;
    } else {
      v.push_back("split: must be an object");
    }
  }
  if (has_cv) {
    const auto& s = doc.at("cv");
    if (s.is_object()) {
      detail::FieldReader cr(s, "cv.", v);
      CvSpec spec;
      spec.k = cr.get<std::size_t>("k", spec.k);
      const auto scope = cr.get<std::string>("scope", "full");
      if (scope == "full") {
        spec.scope = CvScope::kFull;
      } else if (scope == "train") {
        spec.scope = CvScope::kTrain;
      } else {
        v.push_back("cv.scope: unknown scope '" + scope + "' (full | train)");
      }
      spec.stratified = cr.get<bool>("stratified", spec.stratified);
      spec.retain_artifacts = cr.get<bool>("retain_artifacts", spec.retain_artifacts);
      spec.holdout_fraction = cr.get<double>("holdout_fraction", spec.holdout_fraction);
      cr.reject_unknown();
      if (spec.k < 2) v.push_back("cv.k: must be at least 2");
      if (!(spec.holdout_fraction > 0.0 && spec.holdout_fraction < 1.0)) {
        v.push_back("cv.holdout_fraction: must lie in (0,1)");
      }
      c.cv = spec;
    } else {
      v.push_back("cv: must be an object");
    }
  }

  if (doc.contains("backends")) {
    const auto& b = doc.at("backends");
    if (b.is_object()) {
      detail::FieldReader br(b, "backends.", v);
      br.known({"visual", "text"});
      br.reject_unknown();
      if (b.contains("visual")) c.visual_backend = detail::parse_backend(b.at("visual"), "visual", v);
      if (b.contains("text")) c.text_backend = detail::parse_backend(b.at("text"), "text", v);
    } else {
      v.push_back("backends: must be an object");
    }
  }

  const auto features = r.get<std::string>("features", "fused");
  if (features == "fused") {
    c.features = FeatureSet::kFused;
  } else if (features == "text") {
    c.features = FeatureSet::kText;
  } else if (features == "visual") {
    c.features = FeatureSet::kVisual;
  } else {
    v.push_back("features: unknown feature set '" + features + "' (fused | text | visual)");
  }
  const bool needs_visual = c.features != FeatureSet::kText;
  const bool needs_text = c.features != FeatureSet::kVisual;
  if (needs_visual && !c.visual_backend) v.push_back("backends.visual: required for " + features + " features");
  if (needs_text && !c.text_backend) v.push_back("backends.text: required for " + features + " features");

  if (doc.contains("model")) {
    c.model = detail::parse_model(doc.at("model"), v);
  } else {
    v.push_back("model: section is required");
  }
  r.reject_unknown();

  // Derived model fields.
  std::size_t feature_dim = 0;
  if (needs_visual && c.visual_backend) feature_dim += c.visual_backend->dim;
  if (needs_text && c.text_backend) feature_dim += c.text_backend->dim;
  if (auto* mlp = std::get_if<MlpConfig>(&c.model)) {
    mlp->seed = c.seed;
    if (mlp->input_dim == 0) {
      mlp->input_dim = feature_dim;
    } else if (mlp->input_dim != feature_dim) {
      v.push_back("model.input_dim: " + std::to_string(mlp->input_dim) + " disagrees with the " +
                  std::to_string(feature_dim) + "-dim " + features + " features");
    }
    try {
      if (feature_dim > 0) mlp->validate();
    } catch (const Error& e) {
      v.push_back(std::string("model: ") + e.what());
    }
    if (c.cv && mlp->head == MlpHead::kRegressor) {
      v.push_back("cv: cross-validation needs a classifier model, not a regressor");
    }
  } else {
    std::get<SvmConfig>(c.model).seed = c.seed;
  }

  // Referenced paths and the manifest itself.
  if (c.manifest_path.empty()) {
    v.push_back("manifest_path: required");
  } else if (!std::filesystem::exists(c.manifest_file())) {
    v.push_back("manifest_path: not found: " + c.manifest_file().string());
  } else {
    try {
      std::vector<std::string> warnings;
      const auto entries = load_manifest(c.manifest_file(), {c.strict_manifest}, &warnings);
      result.warnings.insert(result.warnings.end(), warnings.begin(), warnings.end());
      const auto manifest_dir = c.manifest_file().parent_path();
      for (const auto& e : entries) {
        if (!detail::filename_safe(e.video_id)) {
          v.push_back("manifest: video_id '" + e.video_id + "' is not filename-safe ([A-Za-z0-9._-])");
        }
        const auto media = e.media_path.is_absolute() ? e.media_path : manifest_dir / e.media_path;
        if (!std::filesystem::exists(media)) {
          result.warnings.push_back("video '" + e.video_id + "': media file not found: " + media.string());
        }
      }
      const std::size_t n = entries.size();
      if (n == 0) v.push_back("manifest: no entries");
      if (c.split && n > 0) {
        const auto n_test = test_count(n, c.split->test_fraction);
        if (n_test == 0 || n_test >= n) {
          v.push_back("split.test_fraction: leaves an empty train or test set over " + std::to_string(n) + " videos");
        }
      }
      if (c.cv && c.cv->scope == CvScope::kFull && c.cv->k > n) {
        v.push_back("cv.k: " + std::to_string(c.cv->k) + " exceeds the " + std::to_string(n) + " videos");
      }
    } catch (const Error& e) {
      v.push_back(std::string("manifest: ") + e.what());
    }
  }
  if (c.output_dir.empty()) v.push_back("output_dir: required");

  result.config = std::move(c);
  return result;
}

inline ConfigValidation validate_config_file(const std::filesystem::path& path,
                                             const ConfigOverrides& overrides = {}) {
  if (!std::filesystem::exists(path)) fail(ErrorCode::kIo, "config file not found: " + path.string());
  const std::string text = read_file_text(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    ConfigValidation result;
    result.violations.push_back(std::string("config is not valid JSON: ") + e.what());
    return result;
  }
  auto base = std::filesystem::absolute(path).parent_path();
  return validate_config(doc, base, overrides);
}

/// Loads a config, raising ErrorCode::kConfig with every violation when it
/// does not validate.
inline ExperimentConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides = {}) {
  auto result = validate_config_file(path, overrides);
  if (!result.ok()) {
    std::string message = "invalid config " + path.string() + ":";
    for (const auto& violation : result.violations) message += "\n  - " + violation;
    fail(ErrorCode::kConfig, message);
  }
  return std::move(*result.config);
}

// ---------------------------------------------------------------------------
// Presets

enum class Framework { kFusionClassifier = 1, kTextSvmCrossValidation = 2, kFusionRegressor = 3 };

inline constexpr std::string_view framework_name(Framework f) {
  switch (f) {
    case Framework::kFusionClassifier: return "framework1";
    case Framework::kTextSvmCrossValidation: return "framework2";
    case Framework::kFusionRegressor: return "framework3";
  }
  return "framework1";
}

inline Framework framework_from_name(std::string_view name) {
  for (auto f : {Framework::kFusionClassifier, Framework::kTextSvmCrossValidation, Framework::kFusionRegressor}) {
    if (framework_name(f) == name) return f;
  }
  fail(ErrorCode::kConfig, "unknown framework '" + std::string(name) + "' (framework1 | framework2 | framework3)");
}

/// Preset config documents. Backends default to mocks with the encoder
/// widths the presets are sized for (512-dim visual, 1536-dim and 768-dim
/// text); swap in http backends for real encoders.
inline nlohmann::json preset_config(Framework framework, const std::string& manifest_path,
                                    const std::string& output_dir) {
  const nlohmann::json visual = {{"type", "mock"}, {"backend_id", "mock-visual"}, {"dim", 512},
                                 {"salt", 1},      {"class_signal", 1.0}};
  const nlohmann::json gpt_text = {{"type", "mock"}, {"backend_id", "mock-text"}, {"dim", 1536},
                                   {"salt", 2},      {"class_signal", 1.0}};
  const nlohmann::json bert_text = {{"type", "mock"}, {"backend_id", "mock-text-regression"},
                                    {"dim", 768},     {"salt", 3},
                                    {"class_signal", 1.0}};
  nlohmann::json doc = {
      {"name", framework_name(framework)},
      {"seed", 42},
      {"manifest_path", manifest_path},
      {"frames", {{"count", 50}}},
      {"pooling", "mean"},
      {"threshold", 7.0},
      {"rating_aggregation", "mean"},
      {"output_dir", output_dir},
  };
  switch (framework) {
    case Framework::kFusionClassifier:
      doc["split"] = {{"test_fraction", 0.1}, {"stratified", true}};
      doc["backends"] = {{"visual", visual}, {"text", gpt_text}};
      doc["features"] = "fused";
      doc["model"] = {{"type", "mlp"},       {"head", "binary_classifier"}, {"hidden_dims", {256, 64}},
                      {"dropout_rate", 0.3}, {"learning_rate", 1e-3},        {"epochs", 100},
                      {"batch_size", 16}};
      break;
    case Framework::kTextSvmCrossValidation:
      doc["cv"] = {{"k", 10}, {"scope", "full"}, {"stratified", false}};
      doc["backends"] = {{"text", gpt_text}};
      doc["features"] = "text";
      doc["model"] = {{"type", "svm"}, {"kernel", "RBF"}, {"regularization_c", 1.0}, {"kernel_width", "auto"}};
      break;
    case Framework::kFusionRegressor:
      doc["split"] = {{"test_fraction", 0.1}, {"stratified", true}};
      doc["backends"] = {{"visual", visual}, {"text", bert_text}};
      doc["features"] = "fused";
      doc["model"] = {{"type", "mlp"},       {"head", "regressor"}, {"hidden_dims", {256, 64}},
                      {"dropout_rate", 0.3}, {"learning_rate", 1e-3}, {"epochs", 100},
                      {"batch_size", 16}};
      break;
  }
  return doc;
}

}  // namespace vidrisk
