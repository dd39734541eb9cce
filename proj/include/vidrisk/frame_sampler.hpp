#pragma once

// Frame index planning inside annotated segments, and the decoder boundary.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "vidrisk/binary_io.hpp"
#include "vidrisk/error.hpp"
#include "vidrisk/random.hpp"

namespace vidrisk {

inline constexpr std::size_t kDefaultFrameCount = 50;

struct TemporalSegment {
  std::uint64_t start_frame = 0;
  std::uint64_t end_frame = 0;  // inclusive
};

struct FramePlan {
  std::string video_id;
  std::vector<std::uint64_t> indices;
  std::size_t count = 0;
};

/// Decoded frame: height x width x 3 channels, 8-bit, row-major HWC.
struct RawImage {
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::vector<std::uint8_t> pixels;

  static constexpr std::uint32_t kChannels = 3;

  friend bool operator==(const RawImage&, const RawImage&) = default;
};

class FrameSource {
 public:
  virtual ~FrameSource() = default;
  virtual std::uint64_t frame_count() const = 0;
  /// Deterministic per (source, index). Not required to be thread-safe.
  virtual RawImage decode(std::uint64_t index) = 0;
};

/// Linspace over [start, end] with inclusive endpoints, rounded half-up.
/// Short segments repeat indices rather than failing.
inline FramePlan sample_indices(TemporalSegment segment, std::size_t count = kDefaultFrameCount,
                                std::string video_id = {}) {
  if (count == 0) fail(ErrorCode::kInvalidArgument, "frame count must be positive");
  if (segment.start_frame > segment.end_frame) {
    fail(ErrorCode::kOutOfRange, "inverted segment");
  }
  FramePlan plan{std::move(video_id), {}, count};
  plan.indices.reserve(count);
  if (count == 1) {
    plan.indices.push_back(segment.start_frame);
    return plan;
  }
  const std::uint64_t span = segment.end_frame - segment.start_frame;
  const std::uint64_t steps = count - 1;
  __extension__ using u128 = unsigned __int128;
  for (std::uint64_t i = 0; i < count; ++i) {
    // round(i * span / steps) in exact integer arithmetic
    const u128 numer = u128{2} * i * span + steps;
    const auto offset = static_cast<std::uint64_t>(numer / (u128{2} * steps));
    plan.indices.push_back(segment.start_frame + offset);
  }
  return plan;
}

inline std::vector<RawImage> extract_frames(FrameSource& source, const FramePlan& plan) {
  const std::uint64_t available = source.frame_count();
  for (auto index : plan.indices) {
    if (index >= available) {
      fail(ErrorCode::kOutOfRange, "video '" + plan.video_id + "': frame index " +
                                       std::to_string(index) + " beyond stream end (" +
                                       std::to_string(available) +
                                       " frames); manifest segment does not match media");
    }
  }
  std::vector<RawImage> frames;
  frames.reserve(plan.indices.size());
  for (auto index : plan.indices) frames.push_back(source.decode(index));
  return frames;
}

/// Procedural video: every pixel is a hash of (seed, frame, position).
class SyntheticFrameSource final : public FrameSource {
 public:
  SyntheticFrameSource(std::uint64_t frames, std::uint32_t height, std::uint32_t width,
                       std::uint64_t seed)
      : frames_(frames), height_(height), width_(width), seed_(seed) {
    if (height == 0 || width == 0) fail(ErrorCode::kInvalidArgument, "synthetic frame size must be positive");
  }

  std::uint64_t frame_count() const override { return frames_; }

  RawImage decode(std::uint64_t index) override {
    if (index >= frames_) {
      fail(ErrorCode::kOutOfRange, "synthetic frame " + std::to_string(index) + " out of range");
    }
    RawImage image{height_, width_, {}};
    image.pixels.resize(static_cast<std::size_t>(height_) * width_ * RawImage::kChannels);
    std::uint64_t state = derive_seed(seed_, index);
    for (std::size_t i = 0; i < image.pixels.size(); i += 8) {
      std::uint64_t word = splitmix64(state);
      for (std::size_t b = 0; b < 8 && i + b < image.pixels.size(); ++b) {
        image.pixels[i + b] = static_cast<std::uint8_t>(word >> (8 * b));
      }
    }
    return image;
  }

 private:
  std::uint64_t frames_;
  std::uint32_t height_;
  std::uint32_t width_;
  std::uint64_t seed_;
};

struct SyntheticVideoSpec {
  std::uint64_t frames = 0;
  std::uint32_t height = 8;
  std::uint32_t width = 8;
  std::uint64_t seed = 0;
};

inline constexpr std::string_view kSyntheticVideoExtension = ".synvid";

/// A ".synvid" file is a JSON object {"frames", "height", "width", "seed"}
/// describing a SyntheticFrameSource. Used for fixtures and dry runs.
inline void write_synthetic_video(const std::filesystem::path& path, const SyntheticVideoSpec& spec) {
  nlohmann::json doc = {{"frames", spec.frames},
                        {"height", spec.height},
                        {"width", spec.width},
                        {"seed", spec.seed}};
  write_file_text(path, doc.dump() + "\n");
}

inline SyntheticVideoSpec read_synthetic_video(const std::filesystem::path& path) {
  try {
    const auto doc = nlohmann::json::parse(read_file_text(path));
    return {doc.at("frames").get<std::uint64_t>(), doc.value("height", 8u),
            doc.value("width", 8u), doc.value("seed", std::uint64_t{0})};
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kDecodeFailure, "malformed synthetic video " + path.string() + ": " + e.what());
  }
}

using FrameSourceFactory =
    std::function<std::unique_ptr<FrameSource>(const std::filesystem::path&)>;

/// Opens ".synvid" files directly; other media go to `fallback` when given.
inline std::unique_ptr<FrameSource> open_frame_source(const std::filesystem::path& path,
                                                      const FrameSourceFactory& fallback = {}) {
  if (!std::filesystem::exists(path)) {
    fail(ErrorCode::kDecodeFailure, "media file not found: " + path.string());
  }
  if (path.extension() == kSyntheticVideoExtension) {
    const auto spec = read_synthetic_video(path);
    return std::make_unique<SyntheticFrameSource>(spec.frames, spec.height, spec.width, spec.seed);
  }
  if (fallback) return fallback(path);
  fail(ErrorCode::kDecodeFailure, "no decoder available for " + path.string());
}

inline void write_frame_plans(std::ostream& out, std::span<const FramePlan> plans) {
  for (const auto& plan : plans) {
    out << nlohmann::json{{"video_id", plan.video_id}, {"indices", plan.indices}}.dump() << '\n';
  }
}

}  // namespace vidrisk
