#pragma once

// FrameSource over OpenCV's video decoder. Only available when the build
// links OpenCV (VIDRISK_HAVE_OPENCV).

#include <opencv2/core.hpp>
#include <opencv2/videoio.hpp>

#include <filesystem>
#include <memory>

#include "vidrisk/error.hpp"
#include "vidrisk/frame_sampler.hpp"

namespace vidrisk {

class OpenCvFrameSource final : public FrameSource {
 public:
  explicit OpenCvFrameSource(const std::filesystem::path& path) : path_(path) {
    if (!capture_.open(path.string())) {
      fail(ErrorCode::kDecodeFailure, "cannot open video " + path.string());
    }
    frame_count_ = static_cast<std::uint64_t>(std::max(0.0, capture_.get(cv::CAP_PROP_FRAME_COUNT)));
  }

  std::uint64_t frame_count() const override { return frame_count_; }

  RawImage decode(std::uint64_t index) override {
    if (index >= frame_count_) {
      fail(ErrorCode::kOutOfRange, path_.string() + ": frame " + std::to_string(index) + " out of range");
    }
    // Sequential reads avoid seeking when plans are ascending.
    if (index != next_index_) {
      capture_.set(cv::CAP_PROP_POS_FRAMES, static_cast<double>(index));
      next_index_ = index;
    }
    cv::Mat bgr;
    if (!capture_.read(bgr) || bgr.empty()) {
      fail(ErrorCode::kDecodeFailure, path_.string() + ": failed to decode frame " + std::to_string(index));
    }
    ++next_index_;
    if (bgr.type() != CV_8UC3) fail(ErrorCode::kDecodeFailure, path_.string() + ": frames are not 8-bit BGR");
    RawImage image{static_cast<std::uint32_t>(bgr.rows), static_cast<std::uint32_t>(bgr.cols), {}};
    image.pixels.resize(static_cast<std::size_t>(bgr.rows) * bgr.cols * 3);
    for (int r = 0; r < bgr.rows; ++r) {
      const auto* row = bgr.ptr<cv::Vec3b>(r);
      auto* out = image.pixels.data() + static_cast<std::size_t>(r) * bgr.cols * 3;
      for (int c = 0; c < bgr.cols; ++c) {
        out[c * 3 + 0] = row[c][2];
        out[c * 3 + 1] = row[c][1];
        out[c * 3 + 2] = row[c][0];
      }
    }
    return image;
  }

 private:
  std::filesystem::path path_;
  cv::VideoCapture capture_;
  std::uint64_t frame_count_ = 0;
  std::uint64_t next_index_ = 0;
};

inline std::unique_ptr<FrameSource> open_opencv_source(const std::filesystem::path& path) {
  return std::make_unique<OpenCvFrameSource>(path);
}

}  // namespace vidrisk
