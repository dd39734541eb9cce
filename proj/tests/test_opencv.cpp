#include <gtest/gtest.h>

#include "support.hpp"

#ifdef VIDRISK_HAVE_OPENCV
#include "vidrisk/opencv_source.hpp"

using namespace vidrisk;
using vidrisk::testkit::error_code_of;

TEST(OpenCvSource, DecodesWrittenVideo) {
  testkit::TempDir dir;
  const auto path = dir / "clip.avi";
  {
    cv::VideoWriter writer(path.string(), cv::VideoWriter::fourcc('M', 'J', 'P', 'G'), 10.0, cv::Size(32, 24));
    if (!writer.isOpened()) GTEST_SKIP() << "no MJPG encoder in this OpenCV build";
    for (int i = 0; i < 12; ++i) {
      cv::Mat frame(24, 32, CV_8UC3, cv::Scalar(0, 0, 20 * i));
      writer.write(frame);
    }
  }
  OpenCvFrameSource source(path);
  ASSERT_EQ(source.frame_count(), 12u);
  const auto frames = extract_frames(source, sample_indices({0, 11}, 4));
  ASSERT_EQ(frames.size(), 4u);
  EXPECT_EQ(frames[0].height, 24u);
  EXPECT_EQ(frames[0].width, 32u);
  // Red channel grows with the frame index; JPEG noise stays well below the 20-step ramp.
  EXPECT_LT(frames[0].pixels[0], frames[3].pixels[0]);
  EXPECT_NEAR(frames[3].pixels[0], 20 * 11, 12);
  EXPECT_EQ(error_code_of([&] { source.decode(12); }), ErrorCode::kOutOfRange);
}

TEST(OpenCvSource, UnreadableFileIsDecodeFailure) {
  testkit::TempDir dir;
  write_file_text(dir / "junk.mp4", "not a video");
  EXPECT_EQ(error_code_of([&] { OpenCvFrameSource source(dir / "junk.mp4"); }), ErrorCode::kDecodeFailure);
}
#else
TEST(OpenCvSource, NotBuilt) { GTEST_SKIP() << "built without OpenCV"; }
#endif
