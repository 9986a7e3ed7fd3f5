#include "omni360/yuv_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "omni360/error.hpp"

namespace omni360 {
namespace {

void decode_plane(const unsigned char* bytes, Plane& p, int bit_depth, long long frame_index) {
  const std::size_t n = p.samples.size();
  if (bit_depth <= 8) {
    std::copy(bytes, bytes + n, p.samples.begin());
    return;
  }
  const int max_value = (1 << bit_depth) - 1;
  for (std::size_t k = 0; k < n; ++k) {
    const auto v = static_cast<std::uint16_t>(bytes[2 * k] | (bytes[2 * k + 1] << 8));
    OMNI360_REQUIRE(v <= max_value, ErrorKind::kData,
                    "frame " + std::to_string(frame_index) + ": sample value " +
                        std::to_string(v) + " exceeds " + std::to_string(bit_depth) + "-bit range");
    p.samples[k] = v;
  }
}

void encode_plane(const Plane& p, int bit_depth, std::vector<unsigned char>& out) {
  if (bit_depth <= 8) {
    for (std::uint16_t s : p.samples) out.push_back(static_cast<unsigned char>(s));
    return;
  }
  for (std::uint16_t s : p.samples) {
    out.push_back(static_cast<unsigned char>(s & 0xff));
    out.push_back(static_cast<unsigned char>(s >> 8));
  }
}

Frame rgb_as_frame(const RgbFrame& f) {
  Frame out;
  out.geometry = {f.width, f.height, f.bit_depth, ChromaFormat::k444};
  out.planes = f.planes;
  return out;
}

struct Bt709Scale {
  double y_offset, y_range, c_mid, c_range, rgb_max;
};

Bt709Scale scale_for(int bit_depth, YuvRange range) {
  const double s = std::ldexp(1.0, bit_depth - 8);
  const double max_value = std::ldexp(1.0, bit_depth) - 1.0;
  const double mid = std::ldexp(1.0, bit_depth - 1);
  if (range == YuvRange::kLimited) return {16.0 * s, 219.0 * s, mid, 224.0 * s, max_value};
  return {0.0, max_value, mid, max_value, max_value};
}

constexpr double kKr = 0.2126;
constexpr double kKb = 0.0722;
constexpr double kKg = 1.0 - kKr - kKb;

std::uint16_t round_clip(double v, double lo, double hi) {
  return static_cast<std::uint16_t>(std::clamp(std::floor(v + 0.5), lo, hi));
}

}  // namespace

SequenceHeaderless open_sequence(const std::filesystem::path& path, const FrameGeometry& g,
                                 double frame_rate) {
  validate(g);
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  OMNI360_REQUIRE(!ec, ErrorKind::kIo, "cannot stat '" + path.string() + "': " + ec.message());
  SequenceHeaderless seq;
  seq.path = path;
  seq.geometry = g;
  seq.frame_rate = frame_rate;
  seq.frame_count = static_cast<long long>(size) / g.bytes_per_frame();
  return seq;
}

std::vector<Frame> read_frames(const SequenceHeaderless& seq, long long first, long long count) {
  validate(seq.geometry);
  OMNI360_REQUIRE(first >= 0 && count >= 0 && first + count <= seq.frame_count,
                  ErrorKind::kContract,
                  "frame range [" + std::to_string(first) + ", " + std::to_string(first + count) +
                      ") exceeds " + std::to_string(seq.frame_count) + " frames of '" +
                      seq.path.string() + "'");
  std::ifstream in(seq.path, std::ios::binary);
  OMNI360_REQUIRE(in.good(), ErrorKind::kIo, "cannot open '" + seq.path.string() + "'");

  const FrameGeometry& g = seq.geometry;
  const long long frame_bytes = g.bytes_per_frame();
  std::vector<Frame> frames;
  frames.reserve(static_cast<std::size_t>(count));
  std::vector<unsigned char> buffer(static_cast<std::size_t>(frame_bytes));
  in.seekg(first * frame_bytes);
  for (long long n = first; n < first + count; ++n) {
    in.read(reinterpret_cast<char*>(buffer.data()), frame_bytes);
    OMNI360_REQUIRE(in.gcount() == frame_bytes, ErrorKind::kIo,
                    "'" + seq.path.string() + "' is truncated at frame " + std::to_string(n));
    Frame f(g);
    const unsigned char* cursor = buffer.data();
    for (auto& plane : f.planes) {
      decode_plane(cursor, plane, g.bit_depth, n);
      cursor += plane.samples.size() * static_cast<std::size_t>(g.bytes_per_sample());
    }
    frames.push_back(std::move(f));
  }
  return frames;
}

SequenceHeaderless write_frames(const std::vector<Frame>& frames, const std::filesystem::path& path,
                                double frame_rate) {
  SequenceHeaderless seq;
  seq.path = path;
  seq.frame_rate = frame_rate;
  if (!frames.empty()) seq.geometry = frames.front().geometry;
  for (const Frame& f : frames) {
    OMNI360_REQUIRE(f.geometry == seq.geometry, ErrorKind::kContract,
                    "write_frames needs frames of identical geometry");
    validate(f);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  OMNI360_REQUIRE(out.good(), ErrorKind::kIo, "cannot create '" + path.string() + "'");
  std::vector<unsigned char> bytes;
  for (const Frame& f : frames) {
    bytes.clear();
    for (const auto& plane : f.planes) encode_plane(plane, f.geometry.bit_depth, bytes);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  out.flush();
  OMNI360_REQUIRE(out.good(), ErrorKind::kIo, "write to '" + path.string() + "' failed");
  seq.frame_count = static_cast<long long>(frames.size());
  return seq;
}

//------------------------------------------------------------------------------

RgbFrame yuv_to_rgb_bt709(const Frame& f, YuvRange range) {
  OMNI360_REQUIRE(f.geometry.chroma == ChromaFormat::k444, ErrorKind::kContract,
                  "YUV to RGB conversion needs a 4:4:4 frame");
  validate(f);
  const Bt709Scale sc = scale_for(f.geometry.bit_depth, range);
  RgbFrame out;
  out.width = f.geometry.width;
  out.height = f.geometry.height;
  out.bit_depth = f.geometry.bit_depth;
  for (auto& p : out.planes) p = Plane(out.width, out.height);
  for (std::size_t k = 0; k < f.y().samples.size(); ++k) {
    const double y = (f.y().samples[k] - sc.y_offset) / sc.y_range;
    const double cb = (f.u().samples[k] - sc.c_mid) / sc.c_range;
    const double cr = (f.v().samples[k] - sc.c_mid) / sc.c_range;
    const double r = y + 2.0 * (1.0 - kKr) * cr;
    const double b = y + 2.0 * (1.0 - kKb) * cb;
    const double g = (y - kKr * r - kKb * b) / kKg;
    out.planes[0].samples[k] = round_clip(r * sc.rgb_max, 0.0, sc.rgb_max);
    out.planes[1].samples[k] = round_clip(g * sc.rgb_max, 0.0, sc.rgb_max);
    out.planes[2].samples[k] = round_clip(b * sc.rgb_max, 0.0, sc.rgb_max);
  }
  return out;
}

Frame rgb_to_yuv_bt709(const RgbFrame& f, YuvRange range) {
  const Frame as_frame = rgb_as_frame(f);
  validate(as_frame);
  const Bt709Scale sc = scale_for(f.bit_depth, range);
  Frame out(as_frame.geometry);
  const double y_lo = range == YuvRange::kLimited ? sc.y_offset : 0.0;
  const double y_hi = range == YuvRange::kLimited ? sc.y_offset + sc.y_range : sc.rgb_max;
  const double c_lo = range == YuvRange::kLimited ? sc.c_mid - sc.c_range / 2 : 0.0;
  const double c_hi = range == YuvRange::kLimited ? sc.c_mid + sc.c_range / 2 : sc.rgb_max;
  for (std::size_t k = 0; k < out.y().samples.size(); ++k) {
    const double r = f.planes[0].samples[k] / sc.rgb_max;
    const double g = f.planes[1].samples[k] / sc.rgb_max;
    const double b = f.planes[2].samples[k] / sc.rgb_max;
    const double y = kKr * r + kKg * g + kKb * b;
    const double cb = (b - y) / (2.0 * (1.0 - kKb));
    const double cr = (r - y) / (2.0 * (1.0 - kKr));
    out.y().samples[k] = round_clip(sc.y_offset + y * sc.y_range, y_lo, y_hi);
    out.u().samples[k] = round_clip(sc.c_mid + cb * sc.c_range, c_lo, c_hi);
    out.v().samples[k] = round_clip(sc.c_mid + cr * sc.c_range, c_lo, c_hi);
  }
  return out;
}

void write_rgb_frames(const std::vector<RgbFrame>& frames, const std::filesystem::path& path) {
  std::vector<Frame> as_frames;
  as_frames.reserve(frames.size());
  for (const auto& f : frames) as_frames.push_back(rgb_as_frame(f));
  write_frames(as_frames, path);
}

std::vector<RgbFrame> read_rgb_frames(const std::filesystem::path& path, int width, int height,
                                      int bit_depth, long long count) {
  const FrameGeometry g{width, height, bit_depth, ChromaFormat::k444};
  const auto seq = open_sequence(path, g);
  std::vector<RgbFrame> out;
  for (auto& f : read_frames(seq, 0, count)) {
    RgbFrame rgb;
    rgb.width = width;
    rgb.height = height;
    rgb.bit_depth = bit_depth;
    rgb.planes = std::move(f.planes);
    out.push_back(std::move(rgb));
  }
  return out;
}

}  // namespace omni360
