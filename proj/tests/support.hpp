#pragma once

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

#include "vidrisk/dataset.hpp"
#include "vidrisk/embedding.hpp"
#include "vidrisk/error.hpp"
#include "vidrisk/random.hpp"

namespace vidrisk::testkit {

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("vidrisk_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Runs `fn` and returns the ErrorCode it throws; fails the test if nothing
/// is thrown.
template <typename Fn>
std::optional<ErrorCode> error_code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

template <typename Fn>
std::string error_message_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

inline std::vector<float> random_values(Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::vector<float> v(n);
  for (auto& x : v) x = static_cast<float>(rng.uniform(lo, hi));
  return v;
}

/// Balanced labels: even index HIGH_ALERT, odd NO_ALERT.
inline std::vector<AlertLabel> alternating_labels(std::size_t n) {
  std::vector<AlertLabel> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = i % 2 == 0 ? AlertLabel::kHighAlert : AlertLabel::kNoAlert;
  return labels;
}

inline std::vector<std::string> numbered_ids(std::size_t n, const std::string& prefix = "v") {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back(prefix + std::to_string(i));
  return ids;
}

/// Mock-embedded class-signal features: each sample's text is unique and the
/// class direction is added with strength +signal / -signal.
inline std::vector<EmbeddingVector> class_signal_text_features(std::span<const AlertLabel> labels,
                                                               std::size_t dim, double signal,
                                                               std::uint64_t salt = 2) {
  MockBackend backend(Modality::kText, dim, salt);
  std::vector<EmbeddingVector> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double s = labels[i] == AlertLabel::kHighAlert ? signal : -signal;
    const std::string id = "sample-" + std::to_string(i);
    out.push_back(embed_text(backend, "summary of " + id, {id, s}));
  }
  return out;
}

/// Fused class-signal features: pooled visual (built from one procedural
/// image per sample) concatenated with text.
inline std::vector<EmbeddingVector> class_signal_fused_features(std::span<const AlertLabel> labels,
                                                                std::size_t visual_dim, std::size_t text_dim,
                                                                double signal) {
  MockBackend visual(Modality::kVisual, visual_dim, 1);
  auto text = class_signal_text_features(labels, text_dim, signal, 2);
  std::vector<EmbeddingVector> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double s = labels[i] == AlertLabel::kHighAlert ? signal : -signal;
    RawImage image{2, 2, std::vector<std::uint8_t>(12, static_cast<std::uint8_t>(i))};
    image.pixels[0] = static_cast<std::uint8_t>(i >> 8);
    const std::string id = "sample-" + std::to_string(i);
    const std::vector<RawImage> frames{image};
    const auto pooled = pool_frames(embed_frames(visual, frames, {id, s}));
    out.push_back(fuse_concat(pooled, text[i]));
  }
  return out;
}

inline double training_accuracy(std::span<const AlertLabel> truth, std::span<const AlertLabel> predicted) {
  std::size_t right = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) right += truth[i] == predicted[i];
  return static_cast<double>(right) / static_cast<double>(truth.size());
}

}  // namespace vidrisk::testkit
