#pragma once

// Manifest ingestion, rating aggregation, alert labelling and seeded splits.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "vidrisk/error.hpp"
#include "vidrisk/random.hpp"

namespace vidrisk {

inline constexpr double kMinRating = 0.0;
inline constexpr double kMaxRating = 10.0;
inline constexpr double kDefaultAlertThreshold = 7.0;

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Rational&, const Rational&) = default;
};

struct VideoManifestEntry {
  std::string video_id;
  std::filesystem::path media_path;
  std::string summary;
  std::vector<int> ratings;
  std::uint64_t segment_start_frame = 0;
  std::uint64_t segment_end_frame = 0;
  std::optional<Rational> fps;

  friend bool operator==(const VideoManifestEntry&, const VideoManifestEntry&) = default;
};

enum class RatingSource { kAggregatedMean, kAggregatedMedian, kProvidedScalar };

enum class RatingAggregation { kMean, kMedian };

struct DangerRating {
  double value = 0.0;
  RatingSource source = RatingSource::kProvidedScalar;
};

enum class AlertLabel : std::uint8_t { kNoAlert = 0, kHighAlert = 1 };

inline constexpr std::string_view to_string(AlertLabel label) {
  return label == AlertLabel::kHighAlert ? "HIGH_ALERT" : "NO_ALERT";
}

inline AlertLabel flipped(AlertLabel label) {
  return label == AlertLabel::kHighAlert ? AlertLabel::kNoAlert : AlertLabel::kHighAlert;
}

struct DatasetSplit {
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
  std::uint64_t seed = 0;
  double test_fraction = 0.1;
  bool stratified = true;

  friend bool operator==(const DatasetSplit&, const DatasetSplit&) = default;
};

struct ManifestOptions {
  /// Reject unknown keys instead of warning about them.
  bool strict = true;
};

namespace detail {

inline std::optional<Rational> parse_fps(const nlohmann::json& value, const std::string& where) {
  if (value.is_null()) return std::nullopt;
  Rational fps;
  if (value.is_number_integer()) {
    fps = {value.get<std::int64_t>(), 1};
  } else if (value.is_number_float()) {
    const double v = value.get<double>();
    if (!std::isfinite(v)) fail(ErrorCode::kParse, where + ": fps is not finite");
    fps = {static_cast<std::int64_t>(std::llround(v * 1e6)), 1000000};
  } else if (value.is_string()) {
    const auto text = value.get<std::string>();
    const auto slash = text.find('/');
    try {
      if (slash == std::string::npos) {
        fps = {std::stoll(text), 1};
      } else {
        fps = {std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1))};
      }
    } catch (const std::exception&) {
      fail(ErrorCode::kParse, where + ": fps '" + text + "' is not a rational");
    }
  } else {
    fail(ErrorCode::kParse, where + ": fps must be a number or \"num/den\" string");
  }
  if (fps.num <= 0 || fps.den <= 0) fail(ErrorCode::kOutOfRange, where + ": fps must be positive");
  const auto g = std::gcd(fps.num, fps.den);
  return Rational{fps.num / g, fps.den / g};
}

inline std::uint64_t parse_frame(const nlohmann::json& record, const char* key,
                                 const std::string& where) {
  if (!record.contains(key)) fail(ErrorCode::kParse, where + ": missing key '" + key + "'");
  const auto& v = record.at(key);
  if (!v.is_number_integer()) fail(ErrorCode::kParse, where + ": '" + key + "' must be an integer");
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  const auto s = v.get<std::int64_t>();
  if (s < 0) fail(ErrorCode::kOutOfRange, where + ": '" + key + "' must be nonnegative");
  return static_cast<std::uint64_t>(s);
}

inline std::string parse_string(const nlohmann::json& record, const char* key,
                                const std::string& where) {
  if (!record.contains(key)) fail(ErrorCode::kParse, where + ": missing key '" + key + "'");
  const auto& v = record.at(key);
  if (!v.is_string()) fail(ErrorCode::kParse, where + ": '" + key + "' must be a string");
  return v.get<std::string>();
}

}  // namespace detail

/// Checks the entry invariants: ratings nonempty and within [0,10], segment
/// not inverted, id nonempty.
inline void validate_entry(const VideoManifestEntry& entry) {
  const std::string who = "video '" + entry.video_id + "'";
  if (entry.video_id.empty()) fail(ErrorCode::kInvalidArgument, "video_id must be nonempty");
  if (entry.ratings.empty()) fail(ErrorCode::kInvalidArgument, who + ": ratings must be nonempty");
  for (int r : entry.ratings) {
    if (r < kMinRating || r > kMaxRating) {
      fail(ErrorCode::kOutOfRange,
           who + ": rating out of range (" + std::to_string(r) + " not in [0,10])");
    }
  }
  if (entry.segment_start_frame > entry.segment_end_frame) {
    fail(ErrorCode::kOutOfRange, who + ": inverted segment (start " +
                                     std::to_string(entry.segment_start_frame) + " > end " +
                                     std::to_string(entry.segment_end_frame) + ")");
  }
  if (entry.fps && (entry.fps->num <= 0 || entry.fps->den <= 0)) {
    fail(ErrorCode::kOutOfRange, who + ": fps must be positive");
  }
}

inline VideoManifestEntry parse_manifest_record(std::string_view line, std::size_t line_number,
                                                const ManifestOptions& options = {},
                                                std::vector<std::string>* warnings = nullptr) {
  const std::string where = "line " + std::to_string(line_number);
  nlohmann::json record;
  try {
    record = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::kParse, where + ": malformed record: " + e.what());
  }
  if (!record.is_object()) fail(ErrorCode::kParse, where + ": record must be an object");

  static const char* const kKnown[] = {"video_id",           "media_path",        "summary",
                                       "ratings",            "segment_start_frame",
                                       "segment_end_frame",  "fps"};
  for (const auto& [key, _] : record.items()) {
    if (std::find(std::begin(kKnown), std::end(kKnown), key) != std::end(kKnown)) continue;
    if (options.strict) fail(ErrorCode::kParse, where + ": unknown key '" + key + "'");
    if (warnings) warnings->push_back(where + ": ignoring unknown key '" + key + "'");
  }

  VideoManifestEntry entry;
  entry.video_id = detail::parse_string(record, "video_id", where);
  entry.media_path = detail::parse_string(record, "media_path", where);
  entry.summary = detail::parse_string(record, "summary", where);
  if (!record.contains("ratings") || !record.at("ratings").is_array()) {
    fail(ErrorCode::kParse, where + ": 'ratings' must be an array of integers");
  }
  for (const auto& r : record.at("ratings")) {
    if (!r.is_number_integer()) fail(ErrorCode::kParse, where + ": ratings must be integers");
    const auto v = r.get<std::int64_t>();
    if (v < 0 || v > 10) {
      fail(ErrorCode::kOutOfRange, where + ": video '" + entry.video_id +
                                       "': rating out of range (" + std::to_string(v) +
                                       " not in [0,10])");
    }
    entry.ratings.push_back(static_cast<int>(v));
  }
  entry.segment_start_frame = detail::parse_frame(record, "segment_start_frame", where);
  entry.segment_end_frame = detail::parse_frame(record, "segment_end_frame", where);
  if (record.contains("fps")) entry.fps = detail::parse_fps(record.at("fps"), where);

  try {
    validate_entry(entry);
  } catch (const Error& e) {
    throw Error(e.code(), where + ": " + e.what());
  }
  return entry;
}

/// Parses a line-delimited manifest. Blank lines are skipped; entries are
/// returned in file order.
inline std::vector<VideoManifestEntry> parse_manifest(std::istream& in,
                                                      const ManifestOptions& options = {},
                                                      std::vector<std::string>* warnings = nullptr) {
  std::vector<VideoManifestEntry> entries;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    auto entry = parse_manifest_record(line, line_number, options, warnings);
    if (!seen.insert(entry.video_id).second) {
      fail(ErrorCode::kDuplicateId, "line " + std::to_string(line_number) +
                                        ": duplicate video_id '" + entry.video_id + "'");
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

inline std::vector<VideoManifestEntry> load_manifest(const std::filesystem::path& path,
                                                     const ManifestOptions& options = {},
                                                     std::vector<std::string>* warnings = nullptr) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open manifest " + path.string());
  try {
    return parse_manifest(in, options, warnings);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

inline nlohmann::json manifest_record_json(const VideoManifestEntry& entry) {
  nlohmann::json record = {
      {"video_id", entry.video_id},
      {"media_path", entry.media_path.generic_string()},
      {"summary", entry.summary},
      {"ratings", entry.ratings},
      {"segment_start_frame", entry.segment_start_frame},
      {"segment_end_frame", entry.segment_end_frame},
  };
  if (entry.fps) {
    record["fps"] = entry.fps->den == 1
                        ? nlohmann::json(entry.fps->num)
                        : nlohmann::json(std::to_string(entry.fps->num) + "/" +
                                         std::to_string(entry.fps->den));
  }
  return record;
}

inline void write_manifest(std::ostream& out, std::span<const VideoManifestEntry> entries) {
  for (const auto& entry : entries) out << manifest_record_json(entry).dump() << '\n';
}

inline DangerRating aggregate_rating(std::span<const int> ratings,
                                     RatingAggregation method = RatingAggregation::kMean) {
  if (ratings.empty()) fail(ErrorCode::kInvalidArgument, "cannot aggregate an empty rating list");
  for (int r : ratings) {
    if (r < kMinRating || r > kMaxRating) {
      fail(ErrorCode::kOutOfRange, "rating out of range (" + std::to_string(r) + ")");
    }
  }
  if (method == RatingAggregation::kMedian) {
    std::vector<int> sorted(ratings.begin(), ratings.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const double median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    return {median, RatingSource::kAggregatedMedian};
  }
  const long sum = std::accumulate(ratings.begin(), ratings.end(), 0L);
  return {static_cast<double>(sum) / static_cast<double>(ratings.size()),
          RatingSource::kAggregatedMean};
}

/// HIGH_ALERT iff the rating reaches the threshold (inclusive).
inline AlertLabel to_alert_label(DangerRating rating, double threshold = kDefaultAlertThreshold) {
  return rating.value >= threshold ? AlertLabel::kHighAlert : AlertLabel::kNoAlert;
}

inline std::size_t test_count(std::size_t n, double test_fraction) {
  return static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
}

/// Seeded train/test partition. Output lists keep the input order of ids.
/// Stratified splits allocate the test budget across classes by largest
/// remainder, so every class gets floor or ceil of its proportional share.
inline DatasetSplit make_split(std::span<const std::string> ids, std::span<const AlertLabel> labels,
                               double test_fraction, std::uint64_t seed, bool stratified) {
  if (ids.size() != labels.size()) {
    fail(ErrorCode::kInvalidArgument, "ids and labels differ in length");
  }
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    fail(ErrorCode::kInvalidArgument, "test_fraction must lie in (0,1)");
  }
  {
    std::unordered_set<std::string> unique(ids.begin(), ids.end());
    if (unique.size() != ids.size()) fail(ErrorCode::kDuplicateId, "split ids must be unique");
  }
  const std::size_t n = ids.size();
  const std::size_t n_test = test_count(n, test_fraction);
  if (n_test == 0 || n_test >= n) {
    fail(ErrorCode::kInvalidArgument, "test_fraction " + std::to_string(test_fraction) +
                                          " over " + std::to_string(n) +
                                          " ids leaves an empty train or test set");
  }

  Rng rng(derive_seed(seed, 0x5911));
  std::vector<bool> in_test(n, false);
  if (!stratified) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(std::span(order));
    for (std::size_t i = 0; i < n_test; ++i) in_test[order[i]] = true;
  } else {
    std::vector<std::size_t> members[2];
    for (std::size_t i = 0; i < n; ++i) members[static_cast<int>(labels[i])].push_back(i);
    std::size_t alloc[2];
    double remainder[2];
    std::size_t allocated = 0;
    for (int c = 0; c < 2; ++c) {
      const double quota =
          static_cast<double>(n_test) * static_cast<double>(members[c].size()) / static_cast<double>(n);
      alloc[c] = static_cast<std::size_t>(std::floor(quota));
      remainder[c] = quota - static_cast<double>(alloc[c]);
      allocated += alloc[c];
    }
    while (allocated < n_test) {
      // Larger remainder first; ties go to the class with more members, then class order.
      int best = -1;
      for (int c = 0; c < 2; ++c) {
        if (alloc[c] >= members[c].size()) continue;
        if (best < 0 || remainder[c] > remainder[best] ||
            (remainder[c] == remainder[best] && members[c].size() > members[best].size())) {
          best = c;
        }
      }
      ++alloc[best];
      remainder[best] = -1.0;
      ++allocated;
    }
    for (int c = 0; c < 2; ++c) {
      rng.shuffle(std::span(members[c]));
      for (std::size_t i = 0; i < alloc[c]; ++i) in_test[members[c][i]] = true;
    }
  }

  DatasetSplit split;
  split.seed = seed;
  split.test_fraction = test_fraction;
  split.stratified = stratified;
  for (std::size_t i = 0; i < n; ++i) {
    (in_test[i] ? split.test_ids : split.train_ids).push_back(ids[i]);
  }
  return split;
}

inline nlohmann::json split_json(const DatasetSplit& split) {
  return {{"train_ids", split.train_ids},
          {"test_ids", split.test_ids},
          {"seed", split.seed},
          {"test_fraction", split.test_fraction},
          {"stratified", split.stratified}};
}

}  // namespace vidrisk
