#pragma once

// Embedding values, encoder backends, pooling and fusion.

#include <cmath>
#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vidrisk/error.hpp"
#include "vidrisk/frame_sampler.hpp"
#include "vidrisk/random.hpp"

namespace vidrisk {

// Numeric values match the kind byte of the cache format.
enum class EmbeddingKind : std::uint8_t { kFrame = 0, kVideoPooled = 1, kText = 2, kFused = 3 };

inline constexpr std::string_view to_string(EmbeddingKind kind) {
  switch (kind) {
    case EmbeddingKind::kFrame: return "FRAME";
    case EmbeddingKind::kVideoPooled: return "VIDEO_POOLED";
    case EmbeddingKind::kText: return "TEXT";
    case EmbeddingKind::kFused: return "FUSED";
  }
  return "UNKNOWN";
}

inline EmbeddingKind embedding_kind_from_string(std::string_view name) {
  for (auto kind : {EmbeddingKind::kFrame, EmbeddingKind::kVideoPooled, EmbeddingKind::kText,
                    EmbeddingKind::kFused}) {
    if (to_string(kind) == name) return kind;
  }
  fail(ErrorCode::kParse, "unknown embedding kind '" + std::string(name) + "'");
}

class EmbeddingVector {
 public:
  EmbeddingVector() = default;

  EmbeddingVector(EmbeddingKind kind, std::vector<float> values)
      : kind_(kind), values_(std::move(values)) {
    if (values_.empty()) fail(ErrorCode::kInvalidArgument, "embedding dim must be positive");
    for (float v : values_) {
      if (!std::isfinite(v)) fail(ErrorCode::kInvalidArgument, "embedding contains a non-finite value");
    }
  }

  EmbeddingKind kind() const { return kind_; }
  std::size_t dim() const { return values_.size(); }
  std::span<const float> values() const { return values_; }
  float operator[](std::size_t i) const { return values_[i]; }

  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;

 private:
  EmbeddingKind kind_ = EmbeddingKind::kFrame;
  std::vector<float> values_;
};

/// Per-frame embeddings of one video; nonempty and homogeneous in dim.
class EmbeddingStack {
 public:
  EmbeddingStack() = default;

  EmbeddingStack(std::string video_id, std::vector<EmbeddingVector> vectors)
      : video_id_(std::move(video_id)), vectors_(std::move(vectors)) {
    if (vectors_.empty()) fail(ErrorCode::kInvalidArgument, "embedding stack must be nonempty");
    for (const auto& v : vectors_) {
      if (v.kind() != EmbeddingKind::kFrame) {
        fail(ErrorCode::kKindMismatch, "embedding stack holds only FRAME vectors");
      }
      if (v.dim() != vectors_.front().dim()) {
        fail(ErrorCode::kDimensionMismatch, "embedding stack dims must be homogeneous");
      }
    }
  }

  const std::string& video_id() const { return video_id_; }
  void set_video_id(std::string id) { video_id_ = std::move(id); }
  std::size_t size() const { return vectors_.size(); }
  std::size_t dim() const { return vectors_.front().dim(); }
  const EmbeddingVector& operator[](std::size_t i) const { return vectors_[i]; }
  std::span<const EmbeddingVector> vectors() const { return vectors_; }

  friend bool operator==(const EmbeddingStack&, const EmbeddingStack&) = default;

 private:
  std::string video_id_;
  std::vector<EmbeddingVector> vectors_;
};

enum class Modality { kVisual, kText };

inline constexpr std::string_view to_string(Modality m) {
  return m == Modality::kVisual ? "VISUAL" : "TEXT";
}

struct BackendDescriptor {
  std::string backend_id;
  Modality modality = Modality::kVisual;
  std::size_t dim = 0;
  std::string version;
  /// The adapter cannot take concurrent calls; the pipeline serializes them.
  bool serial = false;

  friend bool operator==(const BackendDescriptor&, const BackendDescriptor&) = default;
};

inline void to_json(nlohmann::json& j, const BackendDescriptor& d) {
  j = {{"backend_id", d.backend_id},
       {"modality", to_string(d.modality)},
       {"dim", d.dim},
       {"version", d.version},
       {"serial", d.serial}};
}

inline void from_json(const nlohmann::json& j, BackendDescriptor& d) {
  d.backend_id = j.at("backend_id").get<std::string>();
  const auto modality = j.at("modality").get<std::string>();
  if (modality == "VISUAL") {
    d.modality = Modality::kVisual;
  } else if (modality == "TEXT") {
    d.modality = Modality::kText;
  } else {
    fail(ErrorCode::kParse, "unknown modality '" + modality + "'");
  }
  d.dim = j.at("dim").get<std::size_t>();
  d.version = j.value("version", std::string{});
  d.serial = j.value("serial", false);
}

/// Per-call context. Real encoders only use video_id for error messages;
/// synthetic_signal drives the mock backend's class-signal mode.
struct EncodeContext {
  std::string_view video_id{};
  std::optional<double> synthetic_signal{};
};

class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;

  virtual const BackendDescriptor& descriptor() const = 0;

  virtual std::vector<float> encode_image(const RawImage&, const EncodeContext&) const {
    fail(ErrorCode::kKindMismatch, "backend '" + descriptor().backend_id + "' does not encode images");
  }

  virtual std::vector<float> encode_text(std::string_view, const EncodeContext&) const {
    fail(ErrorCode::kKindMismatch, "backend '" + descriptor().backend_id + "' does not encode text");
  }
};

namespace detail {

inline std::string context_prefix(const EncodeContext& ctx) {
  return ctx.video_id.empty() ? std::string{} : "video '" + std::string(ctx.video_id) + "': ";
}

inline void check_backend_output(const EmbeddingBackend& backend, const std::vector<float>& values,
                                 const EncodeContext& ctx) {
  if (values.size() != backend.descriptor().dim) {
    fail(ErrorCode::kBackendFailure,
         context_prefix(ctx) + "backend '" + backend.descriptor().backend_id + "' returned dim " +
             std::to_string(values.size()) + ", descriptor declares " +
             std::to_string(backend.descriptor().dim));
  }
}

template <typename Fn>
auto with_backend_context(const EmbeddingBackend& backend, const EncodeContext& ctx, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kBackendFailure || e.code() == ErrorCode::kBackendUnreachable) {
      const std::string prefix = context_prefix(ctx);
      const std::string what = e.what();
      if (!prefix.empty() && what.rfind(prefix, 0) != 0) throw Error(e.code(), prefix + what);
    }
    throw;
  } catch (const std::exception& e) {
    fail(ErrorCode::kBackendFailure, context_prefix(ctx) + "backend '" +
                                         backend.descriptor().backend_id + "' failed: " + e.what());
  }
}

inline std::string trimmed(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(first, last - first + 1));
}

}  // namespace detail

inline EmbeddingStack embed_frames(const EmbeddingBackend& backend, std::span<const RawImage> frames,
                                   const EncodeContext& ctx = {}) {
  if (backend.descriptor().modality != Modality::kVisual) {
    fail(ErrorCode::kKindMismatch, "embed_frames requires a VISUAL backend, got '" +
                                       backend.descriptor().backend_id + "'");
  }
  if (frames.empty()) {
    fail(ErrorCode::kInvalidArgument, detail::context_prefix(ctx) + "no frames to embed");
  }
  std::vector<EmbeddingVector> vectors;
  vectors.reserve(frames.size());
  for (const auto& frame : frames) {
    auto values = detail::with_backend_context(backend, ctx, [&] {
      return backend.encode_image(frame, ctx);
    });
    detail::check_backend_output(backend, values, ctx);
    vectors.emplace_back(EmbeddingKind::kFrame, std::move(values));
  }
  return EmbeddingStack(std::string(ctx.video_id), std::move(vectors));
}

enum class PoolingMethod { kMean };

inline constexpr std::string_view to_string(PoolingMethod) { return "mean"; }

inline PoolingMethod pooling_from_string(std::string_view name) {
  if (name == "mean") return PoolingMethod::kMean;
  fail(ErrorCode::kParse, "unknown pooling method '" + std::string(name) + "'");
}

/// Elementwise mean over the stack, accumulated in double.
inline EmbeddingVector pool_frames(const EmbeddingStack& stack,
                                   PoolingMethod method = PoolingMethod::kMean) {
  (void)method;
  const std::size_t dim = stack.dim();
  std::vector<double> sum(dim, 0.0);
  for (const auto& v : stack.vectors()) {
    for (std::size_t j = 0; j < dim; ++j) sum[j] += v[j];
  }
  std::vector<float> mean(dim);
  const double n = static_cast<double>(stack.size());
  for (std::size_t j = 0; j < dim; ++j) mean[j] = static_cast<float>(sum[j] / n);
  return {EmbeddingKind::kVideoPooled, std::move(mean)};
}

inline EmbeddingVector embed_text(const EmbeddingBackend& backend, std::string_view summary,
                                  const EncodeContext& ctx = {}) {
  if (backend.descriptor().modality != Modality::kText) {
    fail(ErrorCode::kKindMismatch, "embed_text requires a TEXT backend, got '" +
                                       backend.descriptor().backend_id + "'");
  }
  if (detail::trimmed(summary).empty()) {
    fail(ErrorCode::kInvalidArgument, detail::context_prefix(ctx) + "empty summary");
  }
  auto values = detail::with_backend_context(backend, ctx, [&] {
    return backend.encode_text(summary, ctx);
  });
  detail::check_backend_output(backend, values, ctx);
  return {EmbeddingKind::kText, std::move(values)};
}

/// Visual block first, text block second; values copied exactly.
inline EmbeddingVector fuse_concat(const EmbeddingVector& video, const EmbeddingVector& text) {
  if (video.kind() != EmbeddingKind::kVideoPooled) {
    fail(ErrorCode::kKindMismatch, "fusion expects a VIDEO_POOLED vector first, got " +
                                       std::string(to_string(video.kind())));
  }
  if (text.kind() != EmbeddingKind::kText) {
    fail(ErrorCode::kKindMismatch,
         "fusion expects a TEXT vector second, got " + std::string(to_string(text.kind())));
  }
  std::vector<float> fused;
  fused.reserve(video.dim() + text.dim());
  fused.insert(fused.end(), video.values().begin(), video.values().end());
  fused.insert(fused.end(), text.values().begin(), text.values().end());
  return {EmbeddingKind::kFused, std::move(fused)};
}

/// Deterministic stand-in encoder. Output is a unit vector expanded from a
/// hash of (input bytes, salt). With a synthetic signal s in the context, the
/// output is normalize(noise + s * direction) where direction is a fixed
/// unit vector derived from the salt alone.
class MockBackend final : public EmbeddingBackend {
 public:
  MockBackend(Modality modality, std::size_t dim, std::uint64_t salt,
              std::string backend_id = {})
      : salt_(salt) {
    if (dim == 0) fail(ErrorCode::kInvalidArgument, "mock backend dim must be positive");
    descriptor_.backend_id = backend_id.empty()
                                 ? "mock-" + std::string(modality == Modality::kVisual ? "visual" : "text")
                                 : std::move(backend_id);
    descriptor_.modality = modality;
    descriptor_.dim = dim;
    descriptor_.version = "mock-1/salt-" + std::to_string(salt);
    direction_ = unit_gaussian(derive_seed(salt, 0xd1ec7));
  }

  const BackendDescriptor& descriptor() const override { return descriptor_; }
  std::uint64_t salt() const { return salt_; }
  std::span<const float> signal_direction() const { return direction_; }

  std::vector<float> encode_image(const RawImage& image, const EncodeContext& ctx) const override {
    if (descriptor_.modality != Modality::kVisual) return EmbeddingBackend::encode_image(image, ctx);
    std::uint64_t h = fnv1a64(std::span<const std::uint8_t>(image.pixels));
    h = fnv1a64(std::to_string(image.height) + "x" + std::to_string(image.width), h);
    return finish(h, ctx);
  }

  std::vector<float> encode_text(std::string_view text, const EncodeContext& ctx) const override {
    if (descriptor_.modality != Modality::kText) return EmbeddingBackend::encode_text(text, ctx);
    return finish(fnv1a64(text), ctx);
  }

 private:
  std::vector<float> unit_gaussian(std::uint64_t seed) const {
    Rng rng(seed);
    std::vector<double> raw(descriptor_.dim);
    for (auto& v : raw) v = rng.normal();
    return normalized(raw);
  }

  static std::vector<float> normalized(const std::vector<double>& raw) {
    double norm = 0.0;
    for (double v : raw) norm += v * v;
    norm = std::sqrt(norm);
    std::vector<float> out(raw.size());
    if (norm == 0.0) {
      out[0] = 1.0f;
      return out;
    }
    for (std::size_t i = 0; i < raw.size(); ++i) out[i] = static_cast<float>(raw[i] / norm);
    return out;
  }

  std::vector<float> finish(std::uint64_t content_hash, const EncodeContext& ctx) const {
    std::uint64_t state = content_hash ^ salt_;
    const std::uint64_t seed = splitmix64(state);
    auto noise = unit_gaussian(seed);
    if (!ctx.synthetic_signal || *ctx.synthetic_signal == 0.0) return noise;
    std::vector<double> mixed(noise.size());
    for (std::size_t i = 0; i < noise.size(); ++i) {
      mixed[i] = static_cast<double>(noise[i]) + *ctx.synthetic_signal * direction_[i];
    }
    return normalized(mixed);
  }

  BackendDescriptor descriptor_;
  std::uint64_t salt_;
  std::vector<float> direction_;
};

/// Wraps a backend so that calls are serialized, for adapters that declare
/// themselves serial.
class SerializedBackend final : public EmbeddingBackend {
 public:
  explicit SerializedBackend(const EmbeddingBackend& inner) : inner_(inner) {}

  const BackendDescriptor& descriptor() const override { return inner_.descriptor(); }

  std::vector<float> encode_image(const RawImage& image, const EncodeContext& ctx) const override {
    std::lock_guard lock(mutex_);
    return inner_.encode_image(image, ctx);
  }

  std::vector<float> encode_text(std::string_view text, const EncodeContext& ctx) const override {
    std::lock_guard lock(mutex_);
    return inner_.encode_text(text, ctx);
  }

 private:
  const EmbeddingBackend& inner_;
  mutable std::mutex mutex_;
};

}  // namespace vidrisk
