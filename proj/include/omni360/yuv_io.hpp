#pragma once

#include <filesystem>
#include <vector>

#include "omni360/frame.hpp"

namespace omni360 {

// Headerless planar YUV file (I420 / I444). 8-bit samples take one byte,
// 10-bit samples a little-endian 16-bit word.
struct SequenceHeaderless {
  std::filesystem::path path;
  FrameGeometry geometry;
  double frame_rate = 30.0;
  long long frame_count = 0;
};

// Describes an existing file; frame_count = file size / frame size.
SequenceHeaderless open_sequence(const std::filesystem::path& path, const FrameGeometry& g,
                                 double frame_rate = 30.0);

// Reads frames [first, first + count). Throws kContract when the range
// exceeds seq.frame_count, kIo (naming the frame) on truncation, kData on
// 10-bit samples above 1023.
std::vector<Frame> read_frames(const SequenceHeaderless& seq, long long first, long long count);

// Throws kContract on mixed geometries, kIo when the file cannot be written.
SequenceHeaderless write_frames(const std::vector<Frame>& frames, const std::filesystem::path& path,
                                double frame_rate = 30.0);

//------------------------------------------------------------------------------
// BT.709 colour conversion. RGB is full range; YUV is limited range by
// default (luma 16..235, chroma 16..240 at 8 bits, scaled by 2^(d-8)).

enum class YuvRange { kLimited, kFull };

RgbFrame yuv_to_rgb_bt709(const Frame& f, YuvRange range = YuvRange::kLimited);
Frame rgb_to_yuv_bt709(const RgbFrame& f, YuvRange range = YuvRange::kLimited);

// Planar R, G, B file layout used to hand frames to RGB codecs.
void write_rgb_frames(const std::vector<RgbFrame>& frames, const std::filesystem::path& path);
std::vector<RgbFrame> read_rgb_frames(const std::filesystem::path& path, int width, int height,
                                      int bit_depth, long long count);

}  // namespace omni360
