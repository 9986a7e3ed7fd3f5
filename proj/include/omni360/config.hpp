#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "omni360/codec.hpp"
#include "omni360/projection.hpp"
#include "omni360/rd_analysis.hpp"
#include "omni360/resample.hpp"

namespace omni360 {

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr int kDefaultFramesToCode = 32;
inline constexpr int kDefaultGop = 32;

// Environment variable supplying the default codec tool directory.
inline constexpr const char* kToolDirEnv = "OMNI360_TOOL_DIR";

struct SequenceConfig {
  std::string name;
  std::filesystem::path path;
  FrameGeometry geometry;
  double frame_rate = 30.0;
  int first_frame = 0;
  int frames = kDefaultFramesToCode;
};

enum class RateNormalization {
  kSourcePixels,  // bits / (source width * height * frames)
  kCodedPixels,   // bits / (coded width * height * frames)
};

enum class SequencePooling {
  kMeanDb,     // arithmetic mean of per-frame dB values
  kPooledMse,  // dB of the mean per-frame MSE
};

struct RunConfig {
  std::vector<SequenceConfig> sequences;
  std::vector<ProjectionSpec> formats;  // coded geometry per format
  std::vector<int> quality_points;
  CodecAdapter codec;
  std::filesystem::path output_dir;
  Kernel luma_kernel = Kernel::lanczos(3);
  Kernel chroma_kernel = Kernel::lanczos(2);
  BdFit bd_fit = BdFit::kPiecewiseCubic;
  RateNormalization rate_normalization = RateNormalization::kSourcePixels;
  SequencePooling pooling = SequencePooling::kMeanDb;
  int parallelism = 1;
  // Checks frame availability against the files on disk.
  bool check_sources = true;
};

// JSON config text; relative paths resolve against base_dir. Throws kConfig.
RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

// Canonical JSON (absolute paths, every default spelled out). Parsing it back
// yields an equivalent config.
std::string dump_run_config(const RunConfig& cfg);

// Throws kConfig on an inconsistent config.
void validate(const RunConfig& cfg);

const char* to_string(RateNormalization r);
const char* to_string(SequencePooling p);

// Label used for a format in reports: the format name, plus coefficients
// when they differ from the defaults.
std::string format_label(const ProjectionSpec& spec);

}  // namespace omni360
