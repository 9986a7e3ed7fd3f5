#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "omni360/config.hpp"
#include "support/errors.hpp"

using namespace omni360;
namespace fs = std::filesystem;

namespace {

// Directory with a 64x32 4:2:0 8-bit source of `frames` frames.
fs::path fixture(int frames = 4) {
  const fs::path dir = fs::path(OMNI360_TEST_TMP) / "config";
  fs::create_directories(dir);
  std::ofstream(dir / "clip.yuv", std::ios::binary)
      << std::string(static_cast<std::size_t>(64 * 32 * 3 / 2 * frames), '\x80');
  return dir;
}

const char* kMinimal = R"({
  "schema_version": 1,
  "sequences": [{"path": "clip.yuv", "width": 64, "height": 32, "frames": 2}],
  "formats": ["erp", "acp"]
})";

}  // namespace

TEST_CASE("minimal config gets every default") {
  const fs::path dir = fixture();
  const RunConfig cfg = parse_run_config(kMinimal, dir);
  REQUIRE(cfg.sequences.size() == 1);
  const SequenceConfig& s = cfg.sequences[0];
  CHECK(s.name == "clip");
  CHECK(s.path == dir / "clip.yuv");
  CHECK(s.geometry == FrameGeometry{64, 32, 8, ChromaFormat::k420});
  CHECK(s.frame_rate == 30.0);
  CHECK(s.first_frame == 0);
  CHECK(s.frames == 2);
  CHECK(cfg.output_dir == dir / "omni360_run");
  REQUIRE(cfg.formats.size() == 2);
  CHECK(cfg.formats[1].format == Format::kACP);
  CHECK(cfg.formats[1].coded_geometry.width == default_coded_geometry(Format::kACP).width);
  CHECK(cfg.quality_points == std::vector<int>{0, 1, 2, 3});
  CHECK(cfg.codec.kind == CodecKind::kMockQuantizer);
  CHECK(cfg.codec.name == "mock-quantizer");
  CHECK(cfg.codec.color_mode == ColorMode::kYuvDirect);
  CHECK(cfg.codec.gop == kDefaultGop);
  CHECK(cfg.luma_kernel == Kernel::lanczos(3));
  CHECK(cfg.chroma_kernel == Kernel::lanczos(2));
  CHECK(cfg.bd_fit == BdFit::kPiecewiseCubic);
  CHECK(cfg.rate_normalization == RateNormalization::kSourcePixels);
  CHECK(cfg.pooling == SequencePooling::kMeanDb);
  CHECK(cfg.parallelism == 1);
}

TEST_CASE("full config") {
  const fs::path dir = fixture();
  const RunConfig cfg = parse_run_config(R"({
    "schema_version": 1,
    "output_dir": "/tmp/abs_out",
    "sequences": [{"path": "clip.yuv", "name": "A", "width": 64, "height": 32,
                   "frame_rate": 25, "first_frame": 1, "frames": 3}],
    "formats": ["erp", {"name": "gcp", "coeffs": [0.3, 0.7, 0.2, 0.8], "width": 96, "height": 64},
                "hec:0.34,0.66,0.3,0.7"],
    "quality_points": [3, 1],
    "codec": {"kind": "external-command", "name": "vtm", "encode": "enc {input} {bitstream}",
              "decode": "dec {bitstream} {recon}", "yuv_range": "full", "tool_dir": "/opt/t"},
    "gop": 16,
    "kernel": {"luma": "bilinear", "chroma": "bilinear"},
    "bd_fit": "cubic-poly",
    "parallelism": 3,
    "rate_normalization": "coded-pixels",
    "sequence_pooling": "pooled-mse"
  })", dir);
  CHECK(cfg.output_dir == "/tmp/abs_out");
  CHECK(cfg.sequences[0].name == "A");
  CHECK(cfg.sequences[0].frame_rate == 25);
  CHECK(cfg.formats[1].coded_geometry.width == 96);
  CHECK(cfg.formats[1].poly_u_a == 0.3);
  CHECK(cfg.formats[1].poly_v_b == 0.8);
  CHECK(format_label(cfg.formats[0]) == "erp");
  CHECK(format_label(cfg.formats[1]) == "gcp:0.3,0.7,0.2,0.8");
  CHECK(format_label(cfg.formats[2]).rfind("hec:", 0) == 0);
  CHECK(format_label(ProjectionSpec::from_name("hec", {})) == "hec");
  CHECK(cfg.quality_points == std::vector<int>{3, 1});
  CHECK(cfg.codec.kind == CodecKind::kExternal);
  CHECK(cfg.codec.color_mode == ColorMode::kRgbBt709);
  CHECK(cfg.codec.yuv_range == YuvRange::kFull);
  CHECK(cfg.codec.tool_dir == "/opt/t");
  CHECK(cfg.codec.gop == 16);
  CHECK(cfg.luma_kernel == Kernel::bilinear());
  CHECK(cfg.bd_fit == BdFit::kCubicPolynomial);
  CHECK(cfg.parallelism == 3);
  CHECK(cfg.rate_normalization == RateNormalization::kCodedPixels);
  CHECK(cfg.pooling == SequencePooling::kPooledMse);
}

TEST_CASE("canonical dump round trips") {
  const fs::path dir = fixture();
  const RunConfig a = parse_run_config(kMinimal, dir);
  const std::string text = dump_run_config(a);
  const RunConfig b = parse_run_config(text, "/elsewhere");
  CHECK(dump_run_config(b) == text);
  CHECK(b.sequences[0].path == a.sequences[0].path);
  CHECK(b.output_dir == a.output_dir);
}

TEST_CASE("tool directory from the environment") {
  const fs::path dir = fixture();
  ::setenv(kToolDirEnv, "/env/tools", 1);
  CHECK(parse_run_config(kMinimal, dir).codec.tool_dir == "/env/tools");
  ::unsetenv(kToolDirEnv);
  CHECK(parse_run_config(kMinimal, dir).codec.tool_dir.empty());
}

TEST_CASE("config errors") {
  const fs::path dir = fixture(4);
  auto bad = [&](const std::string& body) {
    CAPTURE(body);
    CHECK_THROWS_KIND(parse_run_config(body, dir), ErrorKind::kConfig);
  };
  const std::string seq = R"("sequences": [{"path": "clip.yuv", "width": 64, "height": 32, "frames": 2}])";
  const std::string head = R"({"schema_version": 1, )" + seq;
  bad("not json");
  bad("[]");
  bad(R"({"sequences": [], "formats": ["erp"]})");
  bad(R"({"schema_version": 2, )" + seq + R"(, "formats": ["erp"]})");
  bad(head + R"(, "formats": ["erp"], "colour": 1})");
  bad(head + "}");
  bad(head + R"(, "formats": []})");
  bad(head + R"(, "formats": ["xyz"]})");
  bad(head + R"(, "formats": [7]})");
  bad(head + R"(, "formats": ["erp", "erp"]})");
  bad(head + R"(, "formats": ["erp"], "quality_points": []})");
  bad(head + R"(, "formats": ["erp"], "quality_points": [1, 1]})");
  bad(head + R"(, "formats": ["erp"], "quality_points": [4]})");
  bad(head + R"(, "formats": ["erp"], "quality_points": "0"})");
  bad(head + R"(, "formats": ["erp"], "parallelism": 0})");
  bad(head + R"(, "formats": ["erp"], "bd_fit": "spline"})");
  bad(head + R"(, "formats": ["erp"], "kernel": {"luma": "cubic9"}})");
  bad(head + R"(, "formats": ["erp"], "rate_normalization": "bytes"})");
  bad(head + R"(, "formats": ["erp"], "sequence_pooling": "max"})");
  bad(head + R"(, "formats": ["erp"], "codec": {"kind": "x264"}})");
  bad(head + R"(, "formats": ["erp"], "codec": {"kind": "external-command", "encode": "e", "decode": "d"}})");
  bad(head + R"(, "formats": ["erp"], "codec": {"color_mode": "xyz"}})");
  bad(head + R"(, "formats": ["erp"], "codec": {"yuv_range": "tv"}})");
  const std::string tail = R"(], "formats": ["erp"]})";
  const std::string pre = R"({"schema_version": 1, "sequences": [)";
  bad(pre + R"({"width": 64, "height": 32})" + tail);
  bad(pre + R"({"path": "missing.yuv", "width": 64, "height": 32})" + tail);
  bad(pre + R"({"path": "clip.yuv", "width": 64, "height": 32, "frames": 5})" + tail);
  bad(pre + R"({"path": "clip.yuv", "width": 64, "height": 32, "first_frame": 3, "frames": 2})" + tail);
  bad(pre + R"({"path": "clip.yuv", "width": 63, "height": 32})" + tail);
  bad(pre + R"({"path": "clip.yuv", "width": 64, "height": 32, "chroma": "422"})" + tail);
  bad(pre + R"({"path": "clip.yuv", "width": 64, "height": 32, "frame_rate": 0, "frames": 1})" + tail);
  bad(pre + R"({"path": "clip.yuv", "width": 64, "height": 32, "frames": 1},
               {"path": "clip.yuv", "width": 64, "height": 32, "frames": 1})" + tail);
  CHECK_THROWS_KIND(load_run_config(dir / "nope.json"), ErrorKind::kConfig);
}

TEST_CASE("load from file resolves against the file's directory") {
  const fs::path dir = fixture();
  std::ofstream(dir / "run.json") << kMinimal;
  const RunConfig cfg = load_run_config(dir / "run.json");
  CHECK(cfg.sequences[0].path == fs::absolute(dir / "clip.yuv").lexically_normal());
  CHECK(std::string(to_string(RateNormalization::kCodedPixels)) == "coded-pixels");
  CHECK(std::string(to_string(SequencePooling::kPooledMse)) == "pooled-mse");
}
