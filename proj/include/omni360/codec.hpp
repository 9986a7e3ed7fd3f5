#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "omni360/frame.hpp"
#include "omni360/yuv_io.hpp"

namespace omni360 {

enum class CodecKind { kNull, kMockQuantizer, kExternal };
enum class ColorMode { kRgbBt709, kYuvDirect };

const char* to_string(CodecKind k);
const char* to_string(ColorMode m);

// Placeholders understood by external command templates:
//   {input} {recon} {bitstream} {q} {width} {height} {bitdepth} {framerate}
//   {gop} {frames} {tool_dir}
// Path placeholders are substituted shell-quoted.
struct CodecAdapter {
  CodecKind kind = CodecKind::kMockQuantizer;
  std::string name = "mock";
  std::string encode_template;
  std::string decode_template;
  ColorMode color_mode = ColorMode::kYuvDirect;
  YuvRange yuv_range = YuvRange::kLimited;
  std::string tool_dir;
  int gop = 32;
};

// kConfig when an external adapter lacks {input}/{bitstream} (encode) or
// {bitstream}/{recon} (decode).
void validate(const CodecAdapter& adapter);

struct CodecOutput {
  long long bits = 0;
  std::vector<Frame> recon;
};

// Runs one codec cell on 4:4:4 frames; work_dir receives files and logs of
// external tools.
CodecOutput run_codec(const CodecAdapter& adapter, std::span<const Frame> frames, int quality,
                      double frame_rate, const std::filesystem::path& work_dir);

//------------------------------------------------------------------------------
// Mock quantizer: uniform mid-rise scalar quantization with step 32, 16, 8, 4
// (8-bit; scaled by 2^(d-8)) for q = 0..3. Quantization indices are predicted
// from the left neighbour (first column: from the sample above) and coded as
// zero-run / level pairs with order-0 exponential-Golomb codes.

int mock_quant_step(int q, int bit_depth);

struct MockBitstream {
  std::vector<std::uint8_t> bytes;
  long long bits = 0;
};

MockBitstream mock_encode(std::span<const Frame> frames, int q);
std::vector<Frame> mock_decode(const MockBitstream& stream);

CodecOutput mock_quantizer_codec(std::span<const Frame> frames, int q);

//------------------------------------------------------------------------------

struct ProcessResult {
  int exit_code = 0;
  bool signaled = false;
  int signal = 0;

  bool ok() const { return !signaled && exit_code == 0; }
};

// Runs `command` through /bin/sh with stdout and stderr appended to log.
ProcessResult run_shell(const std::string& command, const std::filesystem::path& log);

std::string shell_quote(const std::string& s);

CodecOutput external_codec_invoke(const CodecAdapter& adapter, std::span<const Frame> frames,
                                  int quality, double frame_rate,
                                  const std::filesystem::path& work_dir);

}  // namespace omni360
