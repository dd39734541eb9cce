#pragma once

// Experiment stages: embed, train, evaluate, crossval and replicate. Every
// stage is a pure function of (config, inputs, seed); timestamps and host
// details go only into the RunRecord written next to the outputs.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <json.hpp>

#include "vidrisk/binary_io.hpp"
#include "vidrisk/cache.hpp"
#include "vidrisk/config.hpp"
#include "vidrisk/dataset.hpp"
#include "vidrisk/embedding.hpp"
#include "vidrisk/error.hpp"
#include "vidrisk/evaluation.hpp"
#include "vidrisk/frame_sampler.hpp"
#include "vidrisk/hashing.hpp"
#include "vidrisk/http_backend.hpp"
#include "vidrisk/metrics.hpp"
#include "vidrisk/models.hpp"
#include "vidrisk/parallel.hpp"

namespace vidrisk {

using LogSink = std::function<void(const std::string&)>;

inline LogSink stderr_log() {
  return [](const std::string& line) {
    static std::mutex mutex;
    std::lock_guard lock(mutex);
    std::clog << "[vidrisk] " << line << '\n';
  };
}

struct RunContext {
  LogSink log = stderr_log();
  FrameSourceFactory decoder;  // fallback for non-synthetic media
  std::vector<std::string> overrides;
  std::filesystem::path config_file;  // optional, hashed into the RunRecord
};

// ---------------------------------------------------------------------------
// Dataset view

struct LabeledDataset {
  std::vector<VideoManifestEntry> entries;
  std::vector<std::string> ids;
  std::vector<DangerRating> ratings;
  std::vector<AlertLabel> labels;
  std::vector<double> scores;

  std::size_t index_of(const std::string& id) const {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (ids[i] == id) return i;
    }
    fail(ErrorCode::kInvalidArgument, "unknown video id '" + id + "'");
  }
};

inline LabeledDataset load_dataset(const ExperimentConfig& config) {
  LabeledDataset data;
  data.entries = load_manifest(config.manifest_file(), {config.strict_manifest});
  for (const auto& e : data.entries) {
    data.ids.push_back(e.video_id);
    const auto rating = aggregate_rating(e.ratings, config.rating_aggregation);
    data.ratings.push_back(rating);
    data.labels.push_back(to_alert_label(rating, config.threshold));
    data.scores.push_back(rating.value);
  }
  return data;
}

inline DatasetSplit split_for(const ExperimentConfig& config, const LabeledDataset& data) {
  if (!config.split) fail(ErrorCode::kConfig, "this stage needs a split section");
  return make_split(data.ids, data.labels, config.split->test_fraction, config.seed, config.split->stratified);
}

// ---------------------------------------------------------------------------
// Backends and caches

inline std::unique_ptr<EmbeddingBackend> make_backend(const BackendSpec& spec, Modality modality) {
  if (spec.type == BackendType::kMock) {
    return std::make_unique<MockBackend>(modality, spec.dim, spec.salt, spec.backend_id);
  }
  BackendDescriptor d{spec.backend_id, modality, spec.dim, spec.version, spec.serial};
  return std::make_unique<HttpBackend>(d, HttpBackendOptions{spec.url, spec.credentials_env, spec.timeout_seconds});
}

struct CachePaths {
  std::filesystem::path frames;
  std::filesystem::path video;
  std::filesystem::path text;
  std::filesystem::path sidecar;
};

inline CachePaths cache_paths(const std::filesystem::path& dir, const std::string& video_id) {
  return {dir / (video_id + ".frames.vemb"), dir / (video_id + ".video.vemb"),
          dir / (video_id + ".text.vemb"), dir / (video_id + ".meta.jsonl")};
}

inline std::filesystem::path media_file(const ExperimentConfig& config, const VideoManifestEntry& e) {
  return e.media_path.is_absolute() ? e.media_path : config.manifest_file().parent_path() / e.media_path;
}

/// Synthetic signal for mock backends in class-signal mode: +strength for
/// HIGH_ALERT videos, -strength otherwise. Zero for every other backend.
inline std::optional<double> synthetic_signal(const BackendSpec& spec, AlertLabel label) {
  if (spec.type != BackendType::kMock || spec.class_signal == 0.0) return std::nullopt;
  return label == AlertLabel::kHighAlert ? spec.class_signal : -spec.class_signal;
}

namespace detail {

inline void write_atomically(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  auto tmp = path;
  tmp += ".tmp";
  write_file_bytes(tmp, bytes);
  std::filesystem::rename(tmp, path);
}

inline void write_text_atomically(const std::filesystem::path& path, const std::string& text) {
  write_atomically(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

inline std::string visual_input_hash(const ExperimentConfig& config, const VideoManifestEntry& e,
                                     const BackendDescriptor& d, std::optional<double> signal) {
  nlohmann::json j = {{"media", git_blob_hash_file(media_file(config, e))},
                      {"segment", {e.segment_start_frame, e.segment_end_frame}},
                      {"frames", config.frame_count},
                      {"pooling", to_string(config.pooling)},
                      {"backend", d},
                      {"signal", signal ? nlohmann::json(*signal) : nlohmann::json(nullptr)}};
  return sha256_hex(j.dump());
}

inline std::string text_input_hash(const VideoManifestEntry& e, const BackendDescriptor& d,
                                   std::optional<double> signal) {
  nlohmann::json j = {{"summary", e.summary},
                      {"backend", d},
                      {"signal", signal ? nlohmann::json(*signal) : nlohmann::json(nullptr)}};
  return sha256_hex(j.dump());
}

inline std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

inline std::string hostname() {
  char buf[256] = {};
  if (gethostname(buf, sizeof(buf) - 1) != 0) return "unknown";
  return buf;
}

inline std::string pretty(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace detail

// ---------------------------------------------------------------------------
// RunRecord

struct RunRecord {
  std::string command;
  std::string config_hash;
  nlohmann::json config;
  std::vector<std::string> overrides;
  std::map<std::string, std::string> input_hashes;
  std::vector<std::string> artifact_paths;
  std::string report_path;
  std::string started_at;
  double wall_clock_seconds = 0.0;
  std::string host;
  std::string tool_version{kToolVersion};
};

inline nlohmann::json to_json(const RunRecord& r) {
  return {{"command", r.command},
          {"config_hash", r.config_hash},
          {"config", r.config},
          {"overrides", r.overrides},
          {"input_hashes", r.input_hashes},
          {"artifact_paths", r.artifact_paths},
          {"report_path", r.report_path},
          {"started_at", r.started_at},
          {"wall_clock_seconds", r.wall_clock_seconds},
          {"host", r.host},
          {"tool_version", r.tool_version}};
}

class RunRecorder {
 public:
  RunRecorder(std::string command, const ExperimentConfig& config, const RunContext& ctx)
      : started_(std::chrono::steady_clock::now()) {
    record_.command = std::move(command);
    record_.config = to_json(config);
    record_.config_hash = config_hash(config);
    record_.overrides = ctx.overrides;
    record_.started_at = detail::iso_timestamp();
    record_.host = detail::hostname();
    if (std::filesystem::exists(config.manifest_file())) {
      record_.input_hashes["manifest"] = git_blob_hash_file(config.manifest_file());
    }
    if (!ctx.config_file.empty() && std::filesystem::exists(ctx.config_file)) {
      record_.input_hashes["config_file"] = git_blob_hash_file(ctx.config_file);
    }
  }

  RunRecord& record() { return record_; }

  std::filesystem::path write(const std::filesystem::path& dir) {
    record_.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
    const auto path = dir / ("run_record." + record_.command + ".json");
    write_file_text(path, detail::pretty(to_json(record_)));
    return path;
  }

 private:
  RunRecord record_;
  std::chrono::steady_clock::time_point started_;
};

// ---------------------------------------------------------------------------
// embed

struct EmbedFailure {
  std::string video_id;
  std::string message;
};

struct EmbedSummary {
  std::size_t computed = 0;  // cache files written
  std::size_t skipped = 0;   // cache files already up to date
  std::vector<EmbedFailure> failures;
  std::vector<FramePlan> frame_plans;
  std::filesystem::path cache_dir;
};

inline EmbedSummary run_embed(const ExperimentConfig& config, const RunContext& ctx = {},
                              bool export_frame_plans = false) {
  RunRecorder recorder("embed", config, ctx);
  const auto data = load_dataset(config);
  const auto cache_dir = config.cache_path();
  std::filesystem::create_directories(cache_dir);

  std::unique_ptr<EmbeddingBackend> visual;
  std::unique_ptr<EmbeddingBackend> text;
  std::unique_ptr<EmbeddingBackend> visual_serial;
  std::unique_ptr<EmbeddingBackend> text_serial;
  if (config.visual_backend) {
    visual = make_backend(*config.visual_backend, Modality::kVisual);
    if (visual->descriptor().serial) visual_serial = std::make_unique<SerializedBackend>(*visual);
  }
  if (config.text_backend) {
    text = make_backend(*config.text_backend, Modality::kText);
    if (text->descriptor().serial) text_serial = std::make_unique<SerializedBackend>(*text);
  }
  const EmbeddingBackend* visual_use = visual_serial ? visual_serial.get() : visual.get();
  const EmbeddingBackend* text_use = text_serial ? text_serial.get() : text.get();

  EmbedSummary summary;
  summary.cache_dir = cache_dir;
  std::mutex mutex;
  std::vector<std::optional<FramePlan>> plans(data.entries.size());

  parallel_for(data.entries.size(), config.workers, [&](std::size_t i) {
    const auto& entry = data.entries[i];
    const auto paths = cache_paths(cache_dir, entry.video_id);
    std::size_t computed = 0;
    std::size_t skipped = 0;
    try {
      std::map<EmbeddingKind, CacheSidecarRecord> previous;
      if (std::filesystem::exists(paths.sidecar)) {
        for (auto& r : read_sidecar(paths.sidecar)) previous[r.kind] = std::move(r);
      }
      auto up_to_date = [&](EmbeddingKind kind, const std::string& hash, const std::filesystem::path& file) {
        const auto it = previous.find(kind);
        return it != previous.end() && it->second.input_hash == hash && std::filesystem::exists(file);
      };
      std::vector<CacheSidecarRecord> records;
      bool changed = false;

      if (visual_use) {
        const auto signal = synthetic_signal(*config.visual_backend, data.labels[i]);
        const auto& d = visual_use->descriptor();
        const auto plan = sample_indices({entry.segment_start_frame, entry.segment_end_frame},
                                         config.frame_count, entry.video_id);
        plans[i] = plan;
        const auto hash = detail::visual_input_hash(config, entry, d, signal);
        if (up_to_date(EmbeddingKind::kFrame, hash, paths.frames) &&
            up_to_date(EmbeddingKind::kVideoPooled, hash, paths.video)) {
          skipped += 2;
        } else {
          auto source = open_frame_source(media_file(config, entry), ctx.decoder);
          const auto frames = extract_frames(*source, plan);
          const auto stack = embed_frames(*visual_use, frames, {entry.video_id, signal});
          const auto pooled = pool_frames(stack, config.pooling);
          detail::write_atomically(paths.frames, encode_cache(stack));
          detail::write_atomically(paths.video, encode_cache(pooled));
          computed += 2;
          changed = true;
        }
        records.push_back({entry.video_id, paths.frames.filename().string(), EmbeddingKind::kFrame,
                           d.backend_id, d.version, hash});
        records.push_back({entry.video_id, paths.video.filename().string(), EmbeddingKind::kVideoPooled,
                           d.backend_id, d.version, hash});
      }
      if (text_use) {
        const auto signal = synthetic_signal(*config.text_backend, data.labels[i]);
        const auto& d = text_use->descriptor();
        const auto hash = detail::text_input_hash(entry, d, signal);
        if (up_to_date(EmbeddingKind::kText, hash, paths.text)) {
          skipped += 1;
        } else {
          const auto vector = embed_text(*text_use, entry.summary, {entry.video_id, signal});
          detail::write_atomically(paths.text, encode_cache(vector));
          computed += 1;
          changed = true;
        }
        records.push_back({entry.video_id, paths.text.filename().string(), EmbeddingKind::kText,
                           d.backend_id, d.version, hash});
      }
      if (changed || previous.size() != records.size()) {
        std::string text_out;
        for (const auto& r : records) text_out += to_json(r).dump() + "\n";
        detail::write_text_atomically(paths.sidecar, text_out);
      }
      std::lock_guard lock(mutex);
      summary.computed += computed;
      summary.skipped += skipped;
      if (skipped > 0 && computed == 0) ctx.log("video '" + entry.video_id + "': caches up to date, skipped");
    } catch (const std::exception& e) {
      std::string message = e.what();
      if (message.find(entry.video_id) == std::string::npos) message = "video '" + entry.video_id + "': " + message;
      std::lock_guard lock(mutex);
      summary.failures.push_back({entry.video_id, message});
      ctx.log("error: " + message);
    }
  });

  std::sort(summary.failures.begin(), summary.failures.end(),
            [](const auto& a, const auto& b) { return a.video_id < b.video_id; });
  for (auto& p : plans) {
    if (p) summary.frame_plans.push_back(std::move(*p));
  }
  std::filesystem::create_directories(config.output_path());
  if (export_frame_plans && !summary.frame_plans.empty()) {
    std::ostringstream out;
    write_frame_plans(out, summary.frame_plans);
    write_file_text(config.output_path() / "frame_plans.jsonl", out.str());
  }
  ctx.log("embed: " + std::to_string(summary.computed) + " cache files written, " +
          std::to_string(summary.skipped) + " skipped, " + std::to_string(summary.failures.size()) +
          " videos failed");
  recorder.record().report_path = cache_dir.string();
  recorder.write(config.output_path());
  return summary;
}

// ---------------------------------------------------------------------------
// Feature assembly

inline std::vector<EmbeddingVector> load_features(const ExperimentConfig& config,
                                                  std::span<const std::string> ids) {
  const auto dir = config.cache_path();
  std::vector<std::string> missing;
  for (const auto& id : ids) {
    const auto p = cache_paths(dir, id);
    const bool have_visual = std::filesystem::exists(p.video);
    const bool have_text = std::filesystem::exists(p.text);
    const bool ok = config.features == FeatureSet::kFused  ? have_visual && have_text
                    : config.features == FeatureSet::kText ? have_text
                                                           : have_visual;
    if (!ok) missing.push_back(id);
  }
  if (!missing.empty()) {
    std::string message = "missing embedding caches in " + dir.string() + " for " +
                          std::to_string(missing.size()) + " video(s):";
    for (const auto& id : missing) message += " " + id;
    fail(ErrorCode::kMissingCache, message + " (run `vidrisk embed` first)");
  }
  std::vector<EmbeddingVector> features;
  features.reserve(ids.size());
  for (const auto& id : ids) {
    const auto p = cache_paths(dir, id);
    switch (config.features) {
      case FeatureSet::kFused:
        features.push_back(fuse_concat(cache_read_vector(p.video, EmbeddingKind::kVideoPooled),
                                       cache_read_vector(p.text, EmbeddingKind::kText)));
        break;
      case FeatureSet::kText:
        features.push_back(cache_read_vector(p.text, EmbeddingKind::kText));
        break;
      case FeatureSet::kVisual:
        features.push_back(cache_read_vector(p.video, EmbeddingKind::kVideoPooled));
        break;
    }
  }
  return features;
}

inline std::vector<BackendDescriptor> feature_backends(const ExperimentConfig& config) {
  std::vector<BackendDescriptor> out;
  if (config.features != FeatureSet::kText && config.visual_backend) {
    out.push_back(make_backend(*config.visual_backend, Modality::kVisual)->descriptor());
  }
  if (config.features != FeatureSet::kVisual && config.text_backend) {
    out.push_back(make_backend(*config.text_backend, Modality::kText)->descriptor());
  }
  return out;
}

namespace detail {

template <typename T>
std::vector<T> select(std::span<const T> values, const LabeledDataset& data, std::span<const std::string> ids) {
  std::vector<T> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(values[data.index_of(id)]);
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// train

struct TrainOutcome {
  TrainedModelArtifact artifact;
  std::optional<TrainingLog> log;
  DatasetSplit split;
  std::filesystem::path artifact_path;
};

inline TrainedModelArtifact train_model(const ExperimentConfig& config, std::span<const EmbeddingVector> features,
                                        std::span<const AlertLabel> labels, std::span<const double> scores,
                                        std::optional<TrainingLog>* log_out = nullptr) {
  TrainedModelArtifact artifact;
  std::optional<TrainingLog> log;
  if (const auto* mlp = std::get_if<MlpConfig>(&config.model)) {
    auto trained = mlp->head == MlpHead::kBinaryClassifier ? train_binary_classifier(features, labels, *mlp)
                                                           : train_regressor(features, scores, *mlp);
    artifact = std::move(trained.first);
    log = std::move(trained.second);
  } else {
    artifact = train_svm(features, labels, std::get<SvmConfig>(config.model));
  }
  artifact.backends = feature_backends(config);
  artifact.pooling = config.pooling;
  artifact.threshold = config.threshold;
  if (log_out) *log_out = std::move(log);
  return artifact;
}

inline TrainOutcome run_train(const ExperimentConfig& config, const RunContext& ctx = {}) {
  RunRecorder recorder("train", config, ctx);
  const auto data = load_dataset(config);
  TrainOutcome outcome;
  outcome.split = split_for(config, data);
  const auto& train_ids = outcome.split.train_ids;
  const auto features = load_features(config, train_ids);
  const auto labels = detail::select<AlertLabel>(data.labels, data, train_ids);
  const auto scores = detail::select<double>(data.scores, data, train_ids);
  outcome.artifact = train_model(config, features, labels, scores, &outcome.log);

  const auto out = config.output_path();
  std::filesystem::create_directories(out);
  outcome.artifact_path = out / "model.vmdl";
  const auto bytes = encode_artifact(outcome.artifact);
  write_file_bytes(outcome.artifact_path, bytes);
  write_file_text(out / "split.json", detail::pretty(split_json(outcome.split)));
  if (outcome.log) write_file_text(out / "training_log.json", detail::pretty(to_json(*outcome.log)));
  ctx.log("train: " + std::string(to_string(outcome.artifact.kind())) + " artifact on " +
          std::to_string(train_ids.size()) + " videos -> " + outcome.artifact_path.string());

  auto& record = recorder.record();
  record.artifact_paths.push_back(outcome.artifact_path.string());
  record.input_hashes["artifact"] = sha256_hex(bytes);
  recorder.write(out);
  return outcome;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateOutcome {
  MetricsBundle metrics;
  nlohmann::json report;
  std::filesystem::path report_path;
};

inline void check_artifact_matches(const TrainedModelArtifact& artifact, const ExperimentConfig& config) {
  const bool config_svm = std::holds_alternative<SvmConfig>(config.model);
  const bool config_regressor =
      !config_svm && std::get<MlpConfig>(config.model).head == MlpHead::kRegressor;
  const ModelKind expected = config_svm         ? ModelKind::kSvm
                             : config_regressor ? ModelKind::kMlpRegressor
                                                : ModelKind::kMlpBinary;
  if (artifact.kind() != expected) {
    fail(ErrorCode::kKindMismatch, "artifact is " + std::string(to_string(artifact.kind())) +
                                       " but the config describes " + std::string(to_string(expected)));
  }
  if (artifact.feature_kind() != feature_kind(config.features)) {
    fail(ErrorCode::kKindMismatch, "artifact expects " + std::string(to_string(artifact.feature_kind())) +
                                       " features but the config uses " + std::string(to_string(config.features)));
  }
  if (artifact.backends != feature_backends(config)) {
    fail(ErrorCode::kKindMismatch, "artifact was trained with different embedding backends");
  }
}

inline EvaluateOutcome run_evaluate(const ExperimentConfig& config, const std::filesystem::path& artifact_path,
                                    const RunContext& ctx = {}, bool plot = false) {
  RunRecorder recorder("evaluate", config, ctx);
  const auto artifact_bytes = read_file_bytes(artifact_path);
  const auto artifact = decode_artifact(artifact_bytes);
  check_artifact_matches(artifact, config);
  const auto data = load_dataset(config);
  const auto split = split_for(config, data);
  EvaluationSet set;
  set.features = load_features(config, split.test_ids);
  set.labels = detail::select<AlertLabel>(data.labels, data, split.test_ids);
  set.scores = detail::select<double>(data.scores, data, split.test_ids);

  EvaluateOutcome outcome;
  outcome.metrics = evaluate_framework(artifact, set);
  nlohmann::json predictions = nlohmann::json::array();
  for (std::size_t i = 0; i < split.test_ids.size(); ++i) {
    nlohmann::json row = {{"video_id", split.test_ids[i]}, {"rating", set.scores[i]},
                          {"label", to_string(set.labels[i])}};
    switch (artifact.kind()) {
      case ModelKind::kMlpBinary: {
        const auto p = predict_alert(artifact, set.features[i]);
        row["predicted"] = to_string(p.label);
        row["probability"] = p.probability;
        break;
      }
      case ModelKind::kSvm: {
        const auto p = svm_predict(artifact, set.features[i]);
        row["predicted"] = to_string(p.label);
        row["decision_value"] = p.decision_value;
        break;
      }
      case ModelKind::kMlpRegressor:
        row["predicted_score"] = predict_score(artifact, set.features[i]);
        break;
    }
    predictions.push_back(std::move(row));
  }
  outcome.report = {{"tool_version", kToolVersion},
                    {"command", "evaluate"},
                    {"config", to_json(config)},
                    {"seed", config.seed},
                    {"model_kind", to_string(artifact.kind())},
                    {"artifact_sha256", sha256_hex(artifact_bytes)},
                    {"test_ids", split.test_ids},
                    {"metrics", outcome.metrics},
                    {"predictions", std::move(predictions)}};

  const auto out = config.output_path();
  std::filesystem::create_directories(out);
  outcome.report_path = out / "report.json";
  write_file_text(outcome.report_path, detail::pretty(outcome.report));
  auto& record = recorder.record();
  record.input_hashes["artifact"] = sha256_hex(artifact_bytes);
  record.artifact_paths.push_back(artifact_path.string());
  record.report_path = outcome.report_path.string();
  if (outcome.metrics.confusion) {
    const auto& cm = *outcome.metrics.confusion;
    write_file_text(out / "confusion.csv", confusion_csv(cm));
    if (plot) {
      // Minimal 2x2 heat map, rows = actual, columns = predicted.
      const std::uint64_t cells[2][2] = {{cm.tp, cm.fn}, {cm.fp, cm.tn}};
      const double peak = static_cast<double>(std::max({cm.tp, cm.fn, cm.fp, cm.tn, std::uint64_t{1}}));
      std::ostringstream svg;
      svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"320\" height=\"300\" font-family=\"sans-serif\">\n";
      const char* names[2] = {"HIGH_ALERT", "NO_ALERT"};
      for (int r = 0; r < 2; ++r) {
        svg << "<text x=\"10\" y=\"" << 110 + r * 100 << "\" font-size=\"12\">" << names[r] << "</text>\n";
        svg << "<text x=\"" << 120 + r * 100 << "\" y=\"45\" font-size=\"12\">" << names[r] << "</text>\n";
        for (int c = 0; c < 2; ++c) {
          const int shade = 255 - static_cast<int>(200.0 * static_cast<double>(cells[r][c]) / peak);
          svg << "<rect x=\"" << 100 + c * 100 << "\" y=\"" << 60 + r * 100
              << "\" width=\"100\" height=\"100\" fill=\"rgb(" << shade << "," << shade << ",255)\" stroke=\"black\"/>\n";
          svg << "<text x=\"" << 145 + c * 100 << "\" y=\"" << 115 + r * 100 << "\" font-size=\"16\">"
              << cells[r][c] << "</text>\n";
        }
      }
      svg << "<text x=\"100\" y=\"290\" font-size=\"12\">rows: actual, columns: predicted</text>\n</svg>\n";
      write_file_text(out / "confusion.svg", svg.str());
    }
  }
  recorder.write(out);
  ctx.log("evaluate: report -> " + outcome.report_path.string());
  return outcome;
}

// ---------------------------------------------------------------------------
// crossval

struct CrossvalOutcome {
  CrossValidationReport report;
  FoldAssignment assignment;
  nlohmann::json document;
  std::filesystem::path report_path;
};

inline CrossvalOutcome run_crossval(const ExperimentConfig& config, const RunContext& ctx = {}) {
  if (!config.cv) fail(ErrorCode::kConfig, "crossval needs a cv section");
  if (std::holds_alternative<MlpConfig>(config.model) &&
      std::get<MlpConfig>(config.model).head != MlpHead::kBinaryClassifier) {
    fail(ErrorCode::kConfig, "crossval needs a classifier model");
  }
  RunRecorder recorder("crossval", config, ctx);
  const auto data = load_dataset(config);
  std::vector<std::string> ids = data.ids;
  std::optional<DatasetSplit> holdout;
  if (config.cv->scope == CvScope::kTrain) {
    holdout = make_split(data.ids, data.labels, config.cv->holdout_fraction, config.seed, true);
    ids = holdout->train_ids;
  }
  const auto labels = detail::select<AlertLabel>(data.labels, data, ids);
  const auto features = load_features(config, ids);

  CrossvalOutcome outcome;
  outcome.assignment = assign_folds(ids, config.cv->k, config.seed, labels, config.cv->stratified);
  ClassifierConfig model_config = std::holds_alternative<SvmConfig>(config.model)
                                      ? ClassifierConfig(std::get<SvmConfig>(config.model))
                                      : ClassifierConfig(std::get<MlpConfig>(config.model));
  const std::size_t workers = config.workers == 0 ? default_workers() : config.workers;
  outcome.report = run_cross_validation(ids, features, labels, outcome.assignment, model_config,
                                        {workers, config.cv->retain_artifacts});
  {
    nlohmann::json folds = outcome.assignment.fold_of;
    ctx.log("crossval: seed " + std::to_string(config.seed) + " fold assignment " +
            sha256_hex(folds.dump()).substr(0, 12));
  }
  for (const auto& fold : outcome.report.folds) {
    if (fold.skipped_reason) ctx.log("fold " + std::to_string(fold.fold) + " skipped: " + *fold.skipped_reason);
  }

  const auto out = config.output_path();
  std::filesystem::create_directories(out);
  auto& record = recorder.record();
  if (config.cv->retain_artifacts) {
    for (const auto& fold : outcome.report.folds) {
      if (!fold.artifact) continue;
      auto artifact = *fold.artifact;
      artifact.backends = feature_backends(config);
      artifact.pooling = config.pooling;
      artifact.threshold = config.threshold;
      const auto path = out / ("fold" + std::to_string(fold.fold) + ".vmdl");
      serialize_artifact(artifact, path);
      record.artifact_paths.push_back(path.string());
    }
  }
  outcome.document = {{"tool_version", kToolVersion},
                      {"command", "crossval"},
                      {"config", to_json(config)},
                      {"seed", config.seed},
                      {"cross_validation", to_json(outcome.report)},
                      {"fold_of", outcome.assignment.fold_of}};
  if (holdout) outcome.document["holdout_test_ids"] = holdout->test_ids;
  outcome.report_path = out / "cv_report.json";
  write_file_text(outcome.report_path, detail::pretty(outcome.document));
  write_file_text(out / "cv_folds.csv", cross_validation_csv(outcome.report));
  record.report_path = outcome.report_path.string();
  recorder.write(out);
  ctx.log("crossval: mean accuracy " + nlohmann::json(outcome.report.mean_accuracy).dump() + " over " +
          std::to_string(outcome.report.evaluated_folds) + " folds");
  return outcome;
}

// ---------------------------------------------------------------------------
// replicate

/// Reference values the three presets are compared against.
inline constexpr double kReferenceFusionAccuracy = 0.85;
inline constexpr double kReferenceCvMeanAccuracy = 0.79;
inline constexpr double kReferenceCvMinAccuracy = 0.60;
inline constexpr double kReferenceCvMaxAccuracy = 0.90;
inline constexpr double kReferenceRegressionMse = 0.43;

struct ReplicationRow {
  std::string framework;
  std::string metric;
  double obtained = 0.0;
  double reference = 0.0;
  std::string note;

  double delta() const { return obtained - reference; }
};

struct ReplicationRequest {
  std::filesystem::path manifest;
  nlohmann::json backends;  // {"visual": spec, "text": spec, "regression_text": spec (optional)}
  std::filesystem::path output_dir;
  std::uint64_t seed = 42;
  std::size_t workers = 0;
  std::vector<Framework> suite{Framework::kFusionClassifier, Framework::kTextSvmCrossValidation,
                               Framework::kFusionRegressor};
  /// Applied onto each preset's model section (e.g. fewer epochs).
  nlohmann::json model_overrides = nlohmann::json::object();
};

inline nlohmann::json replication_config(Framework f, const ReplicationRequest& req) {
  auto doc = preset_config(f, std::filesystem::absolute(req.manifest).string(),
                           (std::filesystem::absolute(req.output_dir) / framework_name(f)).string());
  doc["seed"] = req.seed;
  doc["workers"] = req.workers;
  if (req.backends.contains("visual") && doc["backends"].contains("visual")) {
    doc["backends"]["visual"] = req.backends["visual"];
  }
  if (req.backends.contains("text")) {
    doc["backends"]["text"] = f == Framework::kFusionRegressor && req.backends.contains("regression_text")
                                  ? req.backends["regression_text"]
                                  : req.backends["text"];
  }
  for (const auto& [key, value] : req.model_overrides.items()) {
    if (doc["model"].contains(key)) doc["model"][key] = value;
  }
  return doc;
}

inline std::string format_replication_table(std::span<const ReplicationRow> rows) {
  std::ostringstream out;
  out << std::left << std::setw(12) << "framework" << std::setw(18) << "metric" << std::setw(10) << "obtained"
      << std::setw(11) << "reference" << std::setw(9) << "delta" << "note\n";
  out << std::fixed << std::setprecision(4);
  for (const auto& r : rows) {
    out << std::setw(12) << r.framework << std::setw(18) << r.metric << std::setw(10) << r.obtained
        << std::setw(11) << r.reference << std::setw(9) << r.delta() << r.note << "\n";
  }
  return out.str();
}

/// Runs the presets end to end and compares against the reference values.
/// Deviations are reported, never gated.
inline std::vector<ReplicationRow> run_replicate(const ReplicationRequest& req, const RunContext& ctx = {}) {
  std::vector<std::string> missing;
  if (req.manifest.empty() || !std::filesystem::exists(req.manifest)) {
    missing.push_back("a dataset manifest (--manifest <file.jsonl>; one JSON record per video with "
                      "video_id, media_path, summary, ratings, segment_start_frame, segment_end_frame)");
  }
  if (!req.backends.is_object() || !req.backends.contains("text")) {
    missing.push_back("encoder backends (--backends <file.json> with \"visual\" and \"text\" entries; "
                      "\"regression_text\" optionally selects a second text encoder)");
  }
  if (!missing.empty()) {
    std::string message = "replicate needs:";
    for (const auto& m : missing) message += "\n  - " + m;
    fail(ErrorCode::kConfig, message);
  }
  std::filesystem::create_directories(req.output_dir);
  std::vector<ReplicationRow> rows;
  for (Framework f : req.suite) {
    const auto doc = replication_config(f, req);
    const auto config_path = req.output_dir / (std::string(framework_name(f)) + ".config.json");
    write_file_text(config_path, detail::pretty(doc));
    RunContext fctx = ctx;
    fctx.config_file = config_path;
    const auto config = load_config(config_path);
    bool mock = false;
    for (const auto* b : {&config.visual_backend, &config.text_backend}) {
      if (*b && (*b)->type == BackendType::kMock) mock = true;
    }
    const std::string note = mock ? "reference not comparable: mock backend" : "";
    const auto embedded = run_embed(config, fctx);
    if (!embedded.failures.empty()) {
      fail(ErrorCode::kBackendFailure, std::string(framework_name(f)) + ": embedding failed for " +
                                           std::to_string(embedded.failures.size()) + " video(s); first: " +
                                           embedded.failures.front().message);
    }
    const std::string name(framework_name(f));
    if (f == Framework::kTextSvmCrossValidation) {
      const auto cv = run_crossval(config, fctx);
      rows.push_back({name, "cv_mean_accuracy", cv.report.mean_accuracy, kReferenceCvMeanAccuracy, note});
      rows.push_back({name, "cv_min_accuracy", cv.report.min_accuracy, kReferenceCvMinAccuracy, note});
      rows.push_back({name, "cv_max_accuracy", cv.report.max_accuracy, kReferenceCvMaxAccuracy, note});
    } else {
      const auto trained = run_train(config, fctx);
      const auto evaluated = run_evaluate(config, trained.artifact_path, fctx);
      if (f == Framework::kFusionClassifier) {
        rows.push_back({name, "accuracy", *evaluated.metrics.accuracy, kReferenceFusionAccuracy, note});
      } else {
        rows.push_back({name, "mse", *evaluated.metrics.mse, kReferenceRegressionMse, note});
      }
    }
  }
  nlohmann::json table = nlohmann::json::array();
  std::string csv = "framework,metric,obtained,reference,delta,note\n";
  for (const auto& r : rows) {
    table.push_back({{"framework", r.framework}, {"metric", r.metric}, {"obtained", r.obtained},
                     {"reference", r.reference}, {"delta", r.delta()}, {"note", r.note}});
    csv += r.framework + "," + r.metric + "," + nlohmann::json(r.obtained).dump() + "," +
           nlohmann::json(r.reference).dump() + "," + nlohmann::json(r.delta()).dump() + "," + r.note + "\n";
  }
  write_file_text(req.output_dir / "replicate.json",
                  detail::pretty({{"tool_version", kToolVersion}, {"seed", req.seed}, {"rows", table}}));
  write_file_text(req.output_dir / "replicate.csv", csv);
  return rows;
}

}  // namespace vidrisk
