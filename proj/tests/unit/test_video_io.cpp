#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "omni360/yuv_io.hpp"
#include "support/errors.hpp"

using namespace omni360;
namespace fs = std::filesystem;

namespace {

fs::path tmp_dir(const std::string& name) {
  const fs::path p = fs::path(OMNI360_TEST_TMP) / "video_io" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Frame random_frame(const FrameGeometry& g, std::mt19937& rng) {
  Frame f(g);
  for (Plane& p : f.planes) {
    for (auto& s : p.samples) s = static_cast<std::uint16_t>(rng() % (g.max_value() + 1));
  }
  return f;
}

void write_bytes(const fs::path& p, const std::vector<unsigned char>& bytes) {
  std::ofstream(p, std::ios::binary).write(reinterpret_cast<const char*>(bytes.data()),
                                           static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("frame sizes and partial reads") {
  const fs::path dir = tmp_dir("sizes");
  const FrameGeometry g{2, 2, 8, ChromaFormat::k420};
  write_bytes(dir / "a.yuv", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12});
  const auto seq = open_sequence(dir / "a.yuv", g);
  CHECK(seq.frame_count == 2);
  const auto frames = read_frames(seq, 0, 1);
  REQUIRE(frames.size() == 1);
  CHECK(frames[0].y().samples == std::vector<std::uint16_t>{1, 2, 3, 4});
  CHECK(frames[0].u().samples == std::vector<std::uint16_t>{5});
  CHECK(frames[0].v().samples == std::vector<std::uint16_t>{6});
  CHECK(read_frames(seq, 1, 1)[0].y().at(0, 0) == 7);
}

TEST_CASE("frame range contract") {
  const fs::path dir = tmp_dir("range");
  const FrameGeometry g{4, 2, 8, ChromaFormat::k420};
  std::vector<Frame> frames(32, Frame(g));
  const auto seq = write_frames(frames, dir / "s.yuv");
  CHECK(seq.frame_count == 32);
  CHECK(read_frames(seq, 0, 32).size() == 32);
  CHECK_THROWS_KIND(read_frames(seq, 0, 33), ErrorKind::kContract);
  CHECK_THROWS_KIND(read_frames(seq, -1, 2), ErrorKind::kContract);
}

TEST_CASE("truncated file reports the failing frame") {
  const fs::path dir = tmp_dir("trunc");
  const FrameGeometry g{4, 2, 8, ChromaFormat::k420};
  const auto seq = write_frames(std::vector<Frame>(3, Frame(g)), dir / "s.yuv");
  fs::resize_file(dir / "s.yuv", g.bytes_per_frame() * 2 + 3);
  try {
    read_frames(seq, 0, 3);  // descriptor still claims 3 frames
    FAIL("expected an I/O error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kIo);
    CHECK(std::string(e.what()).find("frame 2") != std::string::npos);
  }
}

TEST_CASE("10-bit samples above 1023 are data errors") {
  const fs::path dir = tmp_dir("tenbit");
  const FrameGeometry g{2, 2, 10, ChromaFormat::k420};
  std::vector<unsigned char> bytes(12, 0);
  bytes[2] = 0x00;
  bytes[3] = 0x04;  // sample 1 = 1024, little-endian
  write_bytes(dir / "bad.yuv", bytes);
  CHECK_THROWS_KIND(read_frames(open_sequence(dir / "bad.yuv", g), 0, 1), ErrorKind::kData);
  bytes[3] = 0x03;
  bytes[2] = 0xff;  // 1023
  write_bytes(dir / "ok.yuv", bytes);
  CHECK(read_frames(open_sequence(dir / "ok.yuv", g), 0, 1)[0].y().at(1, 0) == 1023);
}

TEST_CASE("write_frames edge cases") {
  const fs::path dir = tmp_dir("write");
  const auto empty = write_frames({}, dir / "empty.yuv");
  CHECK(empty.frame_count == 0);
  CHECK(fs::file_size(dir / "empty.yuv") == 0);
  write_frames({Frame(FrameGeometry{2, 2, 10, ChromaFormat::k444})}, dir / "one.yuv");
  CHECK(fs::file_size(dir / "one.yuv") == 24);
  const std::vector<Frame> mixed = {Frame(FrameGeometry{2, 2, 8, ChromaFormat::k444}),
                                    Frame(FrameGeometry{4, 2, 8, ChromaFormat::k444})};
  CHECK_THROWS_KIND(write_frames(mixed, dir / "mixed.yuv"), ErrorKind::kContract);
  CHECK_THROWS_KIND(write_frames({Frame(FrameGeometry{2, 2, 8, ChromaFormat::k444})},
                                 dir / "missing" / "x.yuv"),
                    ErrorKind::kIo);
}

TEST_CASE("bit-exact file round trip for every depth and chroma format") {
  const fs::path dir = tmp_dir("roundtrip");
  std::mt19937 rng(12);
  for (int depth : {8, 10}) {
    for (ChromaFormat c : {ChromaFormat::k420, ChromaFormat::k444}) {
      const FrameGeometry g{34, 18, depth, c};
      std::vector<Frame> frames;
      for (int i = 0; i < 3; ++i) frames.push_back(random_frame(g, rng));
      const fs::path p = dir / ("rt" + std::to_string(depth) + ".yuv");
      write_frames(frames, p, 25.0);
      CHECK(static_cast<long long>(fs::file_size(p)) == 3 * g.bytes_per_frame());
      CHECK(read_frames(open_sequence(p, g, 25.0), 0, 3) == frames);
    }
  }
}

TEST_CASE("BT.709 limited-range anchors") {
  Frame f(FrameGeometry{2, 1, 8, ChromaFormat::k444});
  f.y().at(0, 0) = 235;
  f.y().at(1, 0) = 16;
  std::fill(f.u().samples.begin(), f.u().samples.end(), 128);
  std::fill(f.v().samples.begin(), f.v().samples.end(), 128);
  const RgbFrame rgb = yuv_to_rgb_bt709(f);
  for (int c = 0; c < 3; ++c) {
    CHECK(rgb.planes[c].at(0, 0) == 255);
    CHECK(rgb.planes[c].at(1, 0) == 0);
  }
  CHECK_THROWS_KIND(yuv_to_rgb_bt709(Frame(FrameGeometry{2, 2, 8, ChromaFormat::k420})),
                    ErrorKind::kContract);
}

TEST_CASE("BT.709 matrix matches the published coefficients") {
  // Full-range pure red: Y = Kr, Cb = -Kr / (2 (1 - Kb)), Cr = 1/2.
  RgbFrame rgb;
  rgb.width = 1;
  rgb.height = 1;
  rgb.bit_depth = 10;
  rgb.planes = {Plane(1, 1, 1023), Plane(1, 1, 0), Plane(1, 1, 0)};
  const Frame yuv = rgb_to_yuv_bt709(rgb, YuvRange::kFull);
  const double kr = 0.2126, kb = 0.0722;
  CHECK(yuv.y().at(0, 0) == std::lround(1023 * kr));
  CHECK(yuv.u().at(0, 0) == std::lround(512 - 1023 * kr / (2 * (1 - kb))));
  CHECK(yuv.v().at(0, 0) == 1023);  // 512 + 511.5 clipped
}

TEST_CASE("BT.709 gray sweep and colour round trip within 1 LSB") {
  for (int depth : {8, 10}) {
    const int scale = 1 << (depth - 8);
    const int lo = 16 * scale, hi = 235 * scale, mid = 128 * scale;
    Frame gray(FrameGeometry{hi - lo + 1, 1, depth, ChromaFormat::k444});
    for (int i = 0; i <= hi - lo; ++i) {
      gray.y().at(i, 0) = static_cast<std::uint16_t>(lo + i);
      gray.u().at(i, 0) = gray.v().at(i, 0) = static_cast<std::uint16_t>(mid);
    }
    const RgbFrame rgb = yuv_to_rgb_bt709(gray);
    int worst_gray = 0;
    for (int i = 0; i <= hi - lo; ++i) {
      worst_gray = std::max(worst_gray, std::abs(rgb.planes[0].at(i, 0) - rgb.planes[1].at(i, 0)));
      worst_gray = std::max(worst_gray, std::abs(rgb.planes[2].at(i, 0) - rgb.planes[1].at(i, 0)));
    }
    CHECK(worst_gray <= 1);
    const Frame back = rgb_to_yuv_bt709(rgb);
    int worst = 0;
    for (int c = 0; c < 3; ++c) {
      for (std::size_t i = 0; i < back.planes[c].samples.size(); ++i) {
        worst = std::max(worst, std::abs(back.planes[c].samples[i] - gray.planes[c].samples[i]));
      }
    }
    CHECK(worst <= 1);
  }
}

TEST_CASE("RGB -> YUV -> RGB over random colours") {
  // The YUV -> RGB direction loses at most the range compression; check the
  // stated invariant rgb_to_yuv(yuv_to_rgb(x)) = x +- 1 on RGB-reachable YUV.
  std::mt19937 rng(21);
  RgbFrame rgb;
  rgb.width = 256;
  rgb.height = 64;
  rgb.bit_depth = 8;
  for (auto& p : rgb.planes) {
    p = Plane(256, 64);
    for (auto& s : p.samples) s = static_cast<std::uint16_t>(rng() % 256);
  }
  const Frame yuv = rgb_to_yuv_bt709(rgb);
  const Frame again = rgb_to_yuv_bt709(yuv_to_rgb_bt709(yuv));
  int worst = 0;
  for (int c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < yuv.planes[c].samples.size(); ++i) {
      worst = std::max(worst, std::abs(again.planes[c].samples[i] - yuv.planes[c].samples[i]));
    }
  }
  CHECK(worst <= 1);
}

TEST_CASE("RGB file round trip") {
  const fs::path dir = tmp_dir("rgb");
  std::mt19937 rng(5);
  std::vector<RgbFrame> frames(2);
  for (auto& f : frames) {
    f.width = 6;
    f.height = 4;
    f.bit_depth = 10;
    for (auto& p : f.planes) {
      p = Plane(6, 4);
      for (auto& s : p.samples) s = static_cast<std::uint16_t>(rng() % 1024);
    }
  }
  write_rgb_frames(frames, dir / "x.rgb");
  CHECK(read_rgb_frames(dir / "x.rgb", 6, 4, 10, 2) == frames);
}
