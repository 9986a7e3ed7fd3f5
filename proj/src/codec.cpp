#include "omni360/codec.hpp"

#include <fstream>
#include <sstream>

#include "omni360/error.hpp"

namespace omni360 {
namespace {

bool contains(const std::string& s, const char* token) { return s.find(token) != std::string::npos; }

std::string substitute(std::string text, const std::vector<std::pair<std::string, std::string>>& vars) {
  for (const auto& [key, value] : vars) {
    const std::string token = "{" + key + "}";
    for (auto pos = text.find(token); pos != std::string::npos;
         pos = text.find(token, pos + value.size())) {
      text.replace(pos, token.size(), value);
    }
  }
  return text;
}

std::string log_tail(const std::filesystem::path& log) {
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  constexpr std::size_t kMax = 2000;
  if (text.size() > kMax) text = "..." + text.substr(text.size() - kMax);
  return text;
}

std::string describe(const ProcessResult& r) {
  if (r.signaled) return "killed by signal " + std::to_string(r.signal);
  return "exit code " + std::to_string(r.exit_code);
}

std::string format_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

const char* to_string(CodecKind k) {
  switch (k) {
    case CodecKind::kNull: return "null";
    case CodecKind::kMockQuantizer: return "mock-quantizer";
    case CodecKind::kExternal: return "external-command";
  }
  return "?";
}

const char* to_string(ColorMode m) {
  return m == ColorMode::kRgbBt709 ? "rgb-bt709" : "yuv-direct";
}

void validate(const CodecAdapter& adapter) {
  OMNI360_REQUIRE(!adapter.name.empty(), ErrorKind::kConfig, "codec needs a name");
  OMNI360_REQUIRE(adapter.gop > 0, ErrorKind::kConfig, "GOP must be positive");
  if (adapter.kind != CodecKind::kExternal) return;
  OMNI360_REQUIRE(contains(adapter.encode_template, "{input}") &&
                      contains(adapter.encode_template, "{bitstream}"),
                  ErrorKind::kConfig, "encode template must contain {input} and {bitstream}");
  OMNI360_REQUIRE(contains(adapter.decode_template, "{bitstream}") &&
                      contains(adapter.decode_template, "{recon}"),
                  ErrorKind::kConfig, "decode template must contain {bitstream} and {recon}");
}

CodecOutput run_codec(const CodecAdapter& adapter, std::span<const Frame> frames, int quality,
                      double frame_rate, const std::filesystem::path& work_dir) {
  validate(adapter);
  for (const Frame& f : frames) {
    OMNI360_REQUIRE(f.geometry.chroma == ChromaFormat::k444, ErrorKind::kContract,
                    "codec input must be 4:4:4");
  }
  if (adapter.kind == CodecKind::kExternal) {
    return external_codec_invoke(adapter, frames, quality, frame_rate, work_dir);
  }

  // In-process codecs see RGB planes when the adapter asks for it.
  std::vector<Frame> input;
  if (adapter.color_mode == ColorMode::kRgbBt709) {
    for (const Frame& f : frames) {
      RgbFrame rgb = yuv_to_rgb_bt709(f, adapter.yuv_range);
      Frame as_frame;
      as_frame.geometry = f.geometry;
      as_frame.planes = std::move(rgb.planes);
      input.push_back(std::move(as_frame));
    }
    frames = input;
  }

  CodecOutput out;
  if (adapter.kind == CodecKind::kNull) {
    out.recon.assign(frames.begin(), frames.end());
  } else {
    out = mock_quantizer_codec(frames, quality);
  }

  if (adapter.color_mode == ColorMode::kRgbBt709) {
    for (Frame& f : out.recon) {
      RgbFrame rgb;
      rgb.width = f.geometry.width;
      rgb.height = f.geometry.height;
      rgb.bit_depth = f.geometry.bit_depth;
      rgb.planes = std::move(f.planes);
      f = rgb_to_yuv_bt709(rgb, adapter.yuv_range);
    }
  }
  return out;
}

CodecOutput external_codec_invoke(const CodecAdapter& adapter, std::span<const Frame> frames,
                                  int quality, double frame_rate,
                                  const std::filesystem::path& work_dir) {
  validate(adapter);
  OMNI360_REQUIRE(!frames.empty(), ErrorKind::kContract, "codec cell without frames");
  std::error_code ec;
  std::filesystem::create_directories(work_dir, ec);
  OMNI360_REQUIRE(!ec, ErrorKind::kIo, "cannot create '" + work_dir.string() + "'");

  const FrameGeometry& g = frames.front().geometry;
  const bool rgb = adapter.color_mode == ColorMode::kRgbBt709;
  const auto input = work_dir / (rgb ? "input.rgb" : "input.yuv");
  const auto bitstream = work_dir / "bitstream.bin";
  const auto recon = work_dir / (rgb ? "recon.rgb" : "recon.yuv");
  std::filesystem::remove(bitstream, ec);
  std::filesystem::remove(recon, ec);

  if (rgb) {
    std::vector<RgbFrame> rgb_frames;
    for (const Frame& f : frames) rgb_frames.push_back(yuv_to_rgb_bt709(f, adapter.yuv_range));
    write_rgb_frames(rgb_frames, input);
  } else {
    write_frames({frames.begin(), frames.end()}, input, frame_rate);
  }

  const std::vector<std::pair<std::string, std::string>> vars = {
      {"input", shell_quote(input.string())},
      {"recon", shell_quote(recon.string())},
      {"bitstream", shell_quote(bitstream.string())},
      {"tool_dir", shell_quote(adapter.tool_dir)},
      {"q", std::to_string(quality)},
      {"width", std::to_string(g.width)},
      {"height", std::to_string(g.height)},
      {"bitdepth", std::to_string(g.bit_depth)},
      {"framerate", format_number(frame_rate)},
      {"gop", std::to_string(adapter.gop)},
      {"frames", std::to_string(frames.size())},
  };

  const auto encode_log = work_dir / "encode.log";
  const auto decode_log = work_dir / "decode.log";
  std::filesystem::remove(encode_log, ec);
  std::filesystem::remove(decode_log, ec);

  const ProcessResult enc = run_shell(substitute(adapter.encode_template, vars), encode_log);
  OMNI360_REQUIRE(enc.ok(), ErrorKind::kCodec,
                  "encoder failed (" + describe(enc) + "):\n" + log_tail(encode_log));
  OMNI360_REQUIRE(std::filesystem::exists(bitstream), ErrorKind::kCodec,
                  "encoder produced no bitstream at '" + bitstream.string() + "'");

  const ProcessResult dec = run_shell(substitute(adapter.decode_template, vars), decode_log);
  OMNI360_REQUIRE(dec.ok(), ErrorKind::kCodec,
                  "decoder failed (" + describe(dec) + "):\n" + log_tail(decode_log));
  OMNI360_REQUIRE(std::filesystem::exists(recon), ErrorKind::kCodec,
                  "decoder produced no reconstruction at '" + recon.string() + "'");

  const FrameGeometry file_geometry{g.width, g.height, g.bit_depth, ChromaFormat::k444};
  const auto expected = static_cast<std::uintmax_t>(file_geometry.bytes_per_frame()) * frames.size();
  const auto actual = std::filesystem::file_size(recon);
  OMNI360_REQUIRE(actual == expected, ErrorKind::kCodec,
                  "reconstruction size " + std::to_string(actual) + " bytes, expected " +
                      std::to_string(expected) + " for " + std::to_string(frames.size()) +
                      " frames of " + std::to_string(g.width) + "x" + std::to_string(g.height));

  CodecOutput out;
  out.bits = static_cast<long long>(std::filesystem::file_size(bitstream)) * 8;
  const auto count = static_cast<long long>(frames.size());
  try {
    if (rgb) {
      for (const auto& f : read_rgb_frames(recon, g.width, g.height, g.bit_depth, count)) {
        out.recon.push_back(rgb_to_yuv_bt709(f, adapter.yuv_range));
      }
    } else {
      out.recon = read_frames(open_sequence(recon, file_geometry, frame_rate), 0, count);
    }
  } catch (const Error& e) {
    raise(ErrorKind::kCodec, std::string("cannot load reconstruction: ") + e.what());
  }
  return out;
}

}  // namespace omni360
