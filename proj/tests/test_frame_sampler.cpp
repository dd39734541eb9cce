#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"
#include "support.hpp"
#include "vidrisk/frame_sampler.hpp"
#include "vidrisk/random.hpp"

using namespace vidrisk;
using vidrisk::testkit::error_code_of;

TEST(SampleIndices, StepExactlyTwo) {
  const auto plan = sample_indices({0, 98}, 50);
  ASSERT_EQ(plan.indices.size(), 50u);
  for (std::size_t i = 0; i < 50; ++i) EXPECT_EQ(plan.indices[i], 2 * i);
}

TEST(SampleIndices, DegenerateSegmentRepeats) {
  const auto plan = sample_indices({5, 5}, 50);
  EXPECT_EQ(plan.indices, std::vector<std::uint64_t>(50, 5));
}

TEST(SampleIndices, MatchesLinspaceOracle) {
  const auto plan = sample_indices({10, 250}, 50);
  EXPECT_EQ(plan.indices, oracle::linspace(10, 250, 50));
  EXPECT_EQ(plan.indices.front(), 10u);
  EXPECT_EQ(plan.indices.back(), 250u);
  EXPECT_EQ(std::set<std::uint64_t>(plan.indices.begin(), plan.indices.end()).size(), 50u);
}

TEST(SampleIndices, RandomSegmentsProperties) {
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const std::uint64_t start = rng.below(100000);
    const std::uint64_t end = start + rng.below(trial % 3 == 0 ? 60 : 20000);
    const std::size_t count = 1 + rng.below(80);
    const auto plan = sample_indices({start, end}, count, "v");
    ASSERT_EQ(plan.indices, oracle::linspace(start, end, count));
    EXPECT_EQ(plan.count, count);
    EXPECT_EQ(plan.video_id, "v");
    EXPECT_EQ(plan.indices.front(), start);
    if (count > 1) {
      EXPECT_EQ(plan.indices.back(), end);
    }
    for (std::size_t i = 1; i < count; ++i) EXPECT_LE(plan.indices[i - 1], plan.indices[i]);
  }
}

TEST(SampleIndices, HugeFrameNumbersDoNotOverflow) {
  const std::uint64_t big = std::numeric_limits<std::uint64_t>::max() - 1;
  const auto plan = sample_indices({0, big}, 3);
  EXPECT_EQ(plan.indices[0], 0u);
  EXPECT_EQ(plan.indices[1], big / 2);
  EXPECT_EQ(plan.indices[2], big);
}

TEST(SampleIndices, InvalidInputs) {
  EXPECT_EQ(error_code_of([] { sample_indices({0, 10}, 0); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(error_code_of([] { sample_indices({10, 0}, 5); }), ErrorCode::kOutOfRange);
}

TEST(ExtractFrames, SingleFrameSource) {
  SyntheticFrameSource source(1, 4, 4, 3);
  const auto frames = extract_frames(source, sample_indices({0, 0}, 1));
  ASSERT_EQ(frames.size(), 1u);
  EXPECT_EQ(frames[0].pixels.size(), 4u * 4u * 3u);
}

TEST(ExtractFrames, OutOfRangeIndex) {
  SyntheticFrameSource source(10, 2, 2, 3);
  EXPECT_EQ(error_code_of([&] { extract_frames(source, sample_indices({0, 10}, 5, "clip")); }),
            ErrorCode::kOutOfRange);
  const auto message = testkit::error_message_of([&] { extract_frames(source, sample_indices({0, 10}, 5, "clip")); });
  EXPECT_NE(message.find("clip"), std::string::npos);
}

TEST(ExtractFrames, MatchesPerIndexDecode) {
  SyntheticFrameSource source(300, 6, 5, 77);
  const auto plan = sample_indices({3, 297}, 50);
  const auto frames = extract_frames(source, plan);
  ASSERT_EQ(frames.size(), 50u);
  SyntheticFrameSource fresh(300, 6, 5, 77);
  for (std::size_t i = 0; i < 50; ++i) {
    const auto expected = fresh.decode(plan.indices[i]);
    EXPECT_EQ(fnv1a64(std::span<const std::uint8_t>(frames[i].pixels)),
              fnv1a64(std::span<const std::uint8_t>(expected.pixels)));
    EXPECT_EQ(frames[i].height, 6u);
    EXPECT_EQ(frames[i].width, 5u);
  }
  EXPECT_NE(frames[0].pixels, frames[1].pixels);
}

TEST(SyntheticVideo, FileRoundTripAndOpen) {
  testkit::TempDir dir;
  const auto path = dir / "clip.synvid";
  write_synthetic_video(path, {120, 4, 3, 9});
  const auto spec = read_synthetic_video(path);
  EXPECT_EQ(spec.frames, 120u);
  EXPECT_EQ(spec.height, 4u);
  EXPECT_EQ(spec.width, 3u);
  auto source = open_frame_source(path);
  EXPECT_EQ(source->frame_count(), 120u);
  EXPECT_EQ(error_code_of([&] { open_frame_source(dir / "missing.synvid"); }), ErrorCode::kDecodeFailure);
  write_file_text(dir / "clip.mp4", "not a video");
  EXPECT_EQ(error_code_of([&] { open_frame_source(dir / "clip.mp4"); }), ErrorCode::kDecodeFailure);
  write_file_text(dir / "bad.synvid", "{}");
  EXPECT_EQ(error_code_of([&] { open_frame_source(dir / "bad.synvid"); }), ErrorCode::kDecodeFailure);
}

TEST(FramePlans, JsonLinesExport) {
  std::vector<FramePlan> plans{sample_indices({0, 4}, 3, "a"), sample_indices({1, 1}, 2, "b")};
  std::ostringstream out;
  write_frame_plans(out, plans);
  std::istringstream in(out.str());
  std::string line;
  std::vector<nlohmann::json> rows;
  while (std::getline(in, line)) rows.push_back(nlohmann::json::parse(line));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0]["video_id"], "a");
  EXPECT_EQ(rows[0]["indices"], (std::vector<int>{0, 2, 4}));
  EXPECT_EQ(rows[1]["indices"], (std::vector<int>{1, 1}));
}
