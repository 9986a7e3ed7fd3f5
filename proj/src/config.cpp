#include "omni360/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "omni360/error.hpp"
#include "omni360/yuv_io.hpp"

namespace omni360 {
namespace {

using nlohmann::json;

const std::set<std::string> kTopLevelKeys = {
    "schema_version", "output_dir",  "sequences",          "formats",
    "quality_points", "codec",       "gop",                "kernel",
    "bd_fit",         "parallelism", "rate_normalization", "sequence_pooling"};

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    raise(ErrorKind::kConfig, std::string("config key '") + key + "' has the wrong type");
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative()) path = base / path;
  return path.lexically_normal();
}

ChromaFormat parse_chroma(const std::string& s) {
  if (s == "420") return ChromaFormat::k420;
  if (s == "444") return ChromaFormat::k444;
  raise(ErrorKind::kConfig, "chroma must be \"420\" or \"444\", got \"" + s + "\"");
}

ProjectionSpec parse_format_entry(const json& j) {
  ProjectionSpec spec;
  if (j.is_string()) {
    spec = ProjectionSpec::parse(j.get<std::string>());
  } else if (j.is_object()) {
    OMNI360_REQUIRE(j.contains("name"), ErrorKind::kConfig, "format entry needs a name");
    spec = ProjectionSpec::from_name(j.at("name").get<std::string>(),
                                     get_or<std::vector<double>>(j, "coeffs", {}));
    spec.coded_geometry.width = get_or<int>(j, "width", spec.coded_geometry.width);
    spec.coded_geometry.height = get_or<int>(j, "height", spec.coded_geometry.height);
  } else {
    raise(ErrorKind::kConfig, "format entries are strings or objects");
  }
  try {
    validate(spec);
  } catch (const Error& e) {
    raise(ErrorKind::kConfig, e.what());
  }
  return spec;
}

CodecKind parse_codec_kind(const std::string& s) {
  if (s == "null") return CodecKind::kNull;
  if (s == "mock-quantizer") return CodecKind::kMockQuantizer;
  if (s == "external-command") return CodecKind::kExternal;
  raise(ErrorKind::kConfig, "unknown codec kind '" + s + "'");
}

ColorMode parse_color_mode(const std::string& s) {
  if (s == "rgb-bt709") return ColorMode::kRgbBt709;
  if (s == "yuv-direct") return ColorMode::kYuvDirect;
  raise(ErrorKind::kConfig, "unknown color mode '" + s + "'");
}

bool has_default_coeffs(const ProjectionSpec& s) {
  return s.poly_u_a == kDefaultPolyA && s.poly_u_b == kDefaultPolyB &&
         s.poly_v_a == kDefaultPolyA && s.poly_v_b == kDefaultPolyB;
}

bool takes_coeffs(Format f) { return f == Format::kACP || f == Format::kGCP || f == Format::kHEC; }

}  // namespace

const char* to_string(RateNormalization r) {
  return r == RateNormalization::kSourcePixels ? "source-pixels" : "coded-pixels";
}

const char* to_string(SequencePooling p) {
  return p == SequencePooling::kMeanDb ? "mean-db" : "pooled-mse";
}

std::string format_label(const ProjectionSpec& spec) {
  std::string label = to_string(spec.format);
  if (takes_coeffs(spec.format) && !has_default_coeffs(spec)) {
    std::ostringstream os;
    os << label << ":" << spec.poly_u_a << "," << spec.poly_u_b << "," << spec.poly_v_a << ","
       << spec.poly_v_b;
    label = os.str();
  }
  return label;
}

RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    raise(ErrorKind::kConfig, std::string("config is not valid JSON: ") + e.what());
  }
  OMNI360_REQUIRE(j.is_object(), ErrorKind::kConfig, "config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    OMNI360_REQUIRE(kTopLevelKeys.contains(key), ErrorKind::kConfig,
                    "unknown config key '" + key + "'");
  }
  const int version = get_or<int>(j, "schema_version", 0);
  OMNI360_REQUIRE(version == kConfigSchemaVersion, ErrorKind::kConfig,
                  "unsupported schema_version " + std::to_string(version) + " (expected " +
                      std::to_string(kConfigSchemaVersion) + ")");

  RunConfig cfg;
  cfg.output_dir = resolve(base_dir, get_or<std::string>(j, "output_dir", "omni360_run"));

  OMNI360_REQUIRE(j.contains("sequences") && j["sequences"].is_array(), ErrorKind::kConfig,
                  "config needs a 'sequences' array");
  for (const auto& s : j["sequences"]) {
    SequenceConfig seq;
    OMNI360_REQUIRE(s.contains("path"), ErrorKind::kConfig, "sequence entry needs a path");
    seq.path = resolve(base_dir, s.at("path").get<std::string>());
    seq.name = get_or<std::string>(s, "name", seq.path.stem().string());
    seq.geometry.width = get_or<int>(s, "width", 0);
    seq.geometry.height = get_or<int>(s, "height", 0);
    seq.geometry.bit_depth = get_or<int>(s, "bit_depth", 8);
    seq.geometry.chroma = parse_chroma(get_or<std::string>(s, "chroma", "420"));
    seq.frame_rate = get_or<double>(s, "frame_rate", 30.0);
    seq.first_frame = get_or<int>(s, "first_frame", 0);
    seq.frames = get_or<int>(s, "frames", kDefaultFramesToCode);
    cfg.sequences.push_back(seq);
  }

  OMNI360_REQUIRE(j.contains("formats") && j["formats"].is_array(), ErrorKind::kConfig,
                  "config needs a 'formats' array");
  for (const auto& f : j["formats"]) cfg.formats.push_back(parse_format_entry(f));

  cfg.quality_points = get_or<std::vector<int>>(j, "quality_points", {0, 1, 2, 3});

  const json codec = j.contains("codec") ? j["codec"] : json::object();
  cfg.codec.kind = parse_codec_kind(get_or<std::string>(codec, "kind", "mock-quantizer"));
  cfg.codec.name = get_or<std::string>(codec, "name", to_string(cfg.codec.kind));
  cfg.codec.encode_template = get_or<std::string>(codec, "encode", "");
  cfg.codec.decode_template = get_or<std::string>(codec, "decode", "");
  const char* default_color = cfg.codec.kind == CodecKind::kExternal ? "rgb-bt709" : "yuv-direct";
  cfg.codec.color_mode = parse_color_mode(get_or<std::string>(codec, "color_mode", default_color));
  const std::string range = get_or<std::string>(codec, "yuv_range", "limited");
  OMNI360_REQUIRE(range == "limited" || range == "full", ErrorKind::kConfig,
                  "yuv_range must be 'limited' or 'full'");
  cfg.codec.yuv_range = range == "limited" ? YuvRange::kLimited : YuvRange::kFull;
  const char* env_tools = std::getenv(kToolDirEnv);
  cfg.codec.tool_dir = get_or<std::string>(codec, "tool_dir", env_tools ? env_tools : "");
  cfg.codec.gop = get_or<int>(j, "gop", kDefaultGop);

  const json kernel = j.contains("kernel") ? j["kernel"] : json::object();
  cfg.luma_kernel = parse_kernel(get_or<std::string>(kernel, "luma", "lanczos3"));
  cfg.chroma_kernel = parse_kernel(get_or<std::string>(kernel, "chroma", "lanczos2"));
  cfg.bd_fit = parse_bd_fit(get_or<std::string>(j, "bd_fit", "piecewise-cubic"));
  cfg.parallelism = get_or<int>(j, "parallelism", 1);

  const std::string norm = get_or<std::string>(j, "rate_normalization", "source-pixels");
  OMNI360_REQUIRE(norm == "source-pixels" || norm == "coded-pixels", ErrorKind::kConfig,
                  "rate_normalization must be 'source-pixels' or 'coded-pixels'");
  cfg.rate_normalization =
      norm == "source-pixels" ? RateNormalization::kSourcePixels : RateNormalization::kCodedPixels;
  const std::string pooling = get_or<std::string>(j, "sequence_pooling", "mean-db");
  OMNI360_REQUIRE(pooling == "mean-db" || pooling == "pooled-mse", ErrorKind::kConfig,
                  "sequence_pooling must be 'mean-db' or 'pooled-mse'");
  cfg.pooling = pooling == "mean-db" ? SequencePooling::kMeanDb : SequencePooling::kPooledMse;

  validate(cfg);
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  OMNI360_REQUIRE(in.good(), ErrorKind::kConfig, "cannot read config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const auto base = std::filesystem::absolute(path).parent_path();
  return parse_run_config(ss.str(), base);
}

void validate(const RunConfig& cfg) {
  OMNI360_REQUIRE(!cfg.sequences.empty(), ErrorKind::kConfig, "config lists no sequences");
  OMNI360_REQUIRE(!cfg.formats.empty(), ErrorKind::kConfig, "config lists no formats");
  OMNI360_REQUIRE(!cfg.quality_points.empty(), ErrorKind::kConfig, "config lists no quality points");
  OMNI360_REQUIRE(cfg.parallelism >= 1, ErrorKind::kConfig, "parallelism must be >= 1");

  std::set<std::string> names;
  for (const auto& s : cfg.sequences) {
    OMNI360_REQUIRE(names.insert(s.name).second, ErrorKind::kConfig,
                    "duplicate sequence name '" + s.name + "'");
    try {
      validate(s.geometry);
    } catch (const Error& e) {
      raise(ErrorKind::kConfig, "sequence '" + s.name + "': " + e.what());
    }
    OMNI360_REQUIRE(s.frames >= 1 && s.first_frame >= 0, ErrorKind::kConfig,
                    "sequence '" + s.name + "': frames must be >= 1");
    OMNI360_REQUIRE(s.frame_rate > 0, ErrorKind::kConfig,
                    "sequence '" + s.name + "': frame_rate must be positive");
    if (cfg.check_sources) {
      SequenceHeaderless seq;
      try {
        seq = open_sequence(s.path, s.geometry, s.frame_rate);
      } catch (const Error& e) {
        raise(ErrorKind::kConfig, "sequence '" + s.name + "': " + e.what());
      }
      OMNI360_REQUIRE(s.first_frame + s.frames <= seq.frame_count, ErrorKind::kConfig,
                      "sequence '" + s.name + "' has " + std::to_string(seq.frame_count) +
                          " frames, " + std::to_string(s.first_frame + s.frames) + " requested");
    }
  }

  std::set<std::string> labels;
  for (const auto& f : cfg.formats) {
    OMNI360_REQUIRE(labels.insert(format_label(f)).second, ErrorKind::kConfig,
                    "duplicate format '" + format_label(f) + "'");
  }

  std::set<int> qualities;
  for (int q : cfg.quality_points) {
    OMNI360_REQUIRE(qualities.insert(q).second, ErrorKind::kConfig,
                    "duplicate quality point " + std::to_string(q));
    if (cfg.codec.kind == CodecKind::kMockQuantizer) {
      OMNI360_REQUIRE(q >= 0 && q <= 3, ErrorKind::kConfig,
                      "mock quantizer quality points must be in {0,1,2,3}");
    }
  }
  validate(cfg.codec);
}

std::string dump_run_config(const RunConfig& cfg) {
  json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["output_dir"] = cfg.output_dir.string();
  j["sequences"] = json::array();
  for (const auto& s : cfg.sequences) {
    j["sequences"].push_back({{"name", s.name},
                              {"path", s.path.string()},
                              {"width", s.geometry.width},
                              {"height", s.geometry.height},
                              {"bit_depth", s.geometry.bit_depth},
                              {"chroma", s.geometry.chroma == ChromaFormat::k420 ? "420" : "444"},
                              {"frame_rate", s.frame_rate},
                              {"first_frame", s.first_frame},
                              {"frames", s.frames}});
  }
  j["formats"] = json::array();
  for (const auto& f : cfg.formats) {
    json e = {{"name", to_string(f.format)},
              {"width", f.coded_geometry.width},
              {"height", f.coded_geometry.height}};
    if (takes_coeffs(f.format)) {
      e["coeffs"] = {f.poly_u_a, f.poly_u_b, f.poly_v_a, f.poly_v_b};
    }
    j["formats"].push_back(e);
  }
  j["quality_points"] = cfg.quality_points;
  j["codec"] = {{"name", cfg.codec.name},
                {"kind", to_string(cfg.codec.kind)},
                {"encode", cfg.codec.encode_template},
                {"decode", cfg.codec.decode_template},
                {"color_mode", to_string(cfg.codec.color_mode)},
                {"yuv_range", cfg.codec.yuv_range == YuvRange::kLimited ? "limited" : "full"},
                {"tool_dir", cfg.codec.tool_dir}};
  j["gop"] = cfg.codec.gop;
  j["kernel"] = {{"luma", to_string(cfg.luma_kernel)}, {"chroma", to_string(cfg.chroma_kernel)}};
  j["bd_fit"] = to_string(cfg.bd_fit);
  j["parallelism"] = cfg.parallelism;
  j["rate_normalization"] = to_string(cfg.rate_normalization);
  j["sequence_pooling"] = to_string(cfg.pooling);
  return j.dump(2);
}

}  // namespace omni360
