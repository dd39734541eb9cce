#pragma once

// Synthetic datasets: procedural ".synvid" media plus a JSONL manifest with
// rated summaries. Used by the shipped demo, the tests and dry runs.

#include <cmath>
#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "vidrisk/binary_io.hpp"
#include "vidrisk/dataset.hpp"
#include "vidrisk/frame_sampler.hpp"
#include "vidrisk/random.hpp"

namespace vidrisk {

struct DemoDatasetOptions {
  std::size_t videos = 40;
  std::uint64_t seed = 7;
  std::size_t raters = 3;
  double high_alert_fraction = 0.5;
  std::uint32_t height = 8;
  std::uint32_t width = 8;
};

namespace detail {

inline const std::vector<std::string>& risky_summaries() {
  static const std::vector<std::string> s{
      "A pedestrian steps off the curb between parked cars directly ahead.",
      "The lead vehicle brakes hard while traffic in the next lane blocks an escape.",
      "A cyclist swerves into the lane without signalling at close range.",
      "An oncoming truck drifts across the centre line on a narrow bend.",
      "A child runs after a ball into the road from behind a van.",
      "A car runs the red light at the intersection as the ego vehicle enters it."};
  return s;
}

inline const std::vector<std::string>& calm_summaries() {
  static const std::vector<std::string> s{
      "Light traffic on a dry highway with steady following distances.",
      "The vehicle waits at a red light with no pedestrians nearby.",
      "A parked car sits well clear of the lane on a quiet residential street.",
      "Traffic moves slowly but predictably through a wide roundabout.",
      "A cyclist rides in a separated bike lane to the right.",
      "The road ahead is empty apart from a distant bus pulling away."};
  return s;
}

}  // namespace detail

/// Writes `<dir>/media/<id>.synvid` files and `<dir>/manifest.jsonl`.
/// Returns the entries in manifest order.
inline std::vector<VideoManifestEntry> write_demo_dataset(const std::filesystem::path& dir,
                                                          const DemoDatasetOptions& opts = {}) {
  std::filesystem::create_directories(dir / "media");
  Rng rng(derive_seed(opts.seed, 0xde30));
  std::vector<VideoManifestEntry> entries;
  for (std::size_t i = 0; i < opts.videos; ++i) {
    // Evenly spaced HIGH_ALERT videos: i is risky when floor((i+1)f) steps up.
    const double f = opts.high_alert_fraction;
    const bool risky = std::floor(static_cast<double>(i + 1) * f) > std::floor(static_cast<double>(i) * f);
    char id[32];
    std::snprintf(id, sizeof(id), "demo_%03zu", i);
    VideoManifestEntry e;
    e.video_id = id;
    e.media_path = std::filesystem::path("media") / (e.video_id + std::string(kSyntheticVideoExtension));
    const auto& pool = risky ? detail::risky_summaries() : detail::calm_summaries();
    e.summary = pool[rng.below(pool.size())];
    for (std::size_t r = 0; r < opts.raters; ++r) {
      e.ratings.push_back(risky ? 7 + static_cast<int>(rng.below(4)) : static_cast<int>(rng.below(7)));
    }
    const std::uint64_t frames = 120 + rng.below(240);
    e.segment_start_frame = rng.below(frames / 4);
    e.segment_end_frame = frames - 1 - rng.below(frames / 4);
    e.fps = Rational{30000, 1001};
    write_synthetic_video(dir / e.media_path, {frames, opts.height, opts.width, derive_seed(opts.seed, i)});
    entries.push_back(std::move(e));
  }
  std::ostringstream manifest;
  write_manifest(manifest, entries);
  write_file_text(dir / "manifest.jsonl", manifest.str());
  return entries;
}

}  // namespace vidrisk
