#include "omni360/pipeline.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "omni360/error.hpp"
#include "omni360/resample.hpp"
#include "omni360/yuv_io.hpp"

namespace omni360 {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

const char* chroma_name(ChromaFormat c) { return c == ChromaFormat::k420 ? "420" : "444"; }

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  OMNI360_REQUIRE(in.good(), ErrorKind::kPipelineState, "missing '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Write-then-rename so a crash never leaves a half-written file behind.
void write_atomic(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    OMNI360_REQUIRE(out.good(), ErrorKind::kIo, "cannot write '" + tmp.string() + "'");
    out << text;
    OMNI360_REQUIRE(out.good(), ErrorKind::kIo, "write to '" + tmp.string() + "' failed");
  }
  fs::rename(tmp, path);
}

void write_frames_atomic(const std::vector<Frame>& frames, const fs::path& path, double fps) {
  const fs::path tmp = path.string() + ".tmp";
  write_frames(frames, tmp, fps);
  fs::rename(tmp, path);
}

json sequence_identity(const SequenceConfig& s) {
  return {{"path", s.path.string()},      {"width", s.geometry.width},
          {"height", s.geometry.height},  {"bit_depth", s.geometry.bit_depth},
          {"chroma", chroma_name(s.geometry.chroma)}, {"frame_rate", s.frame_rate},
          {"first_frame", s.first_frame}, {"frames", s.frames}};
}

std::string intermediate_key(const RunConfig& cfg, const SequenceConfig& seq,
                             const ProjectionSpec& format) {
  const json j = {{"sequence", sequence_identity(seq)},
                  {"format", format.key()},
                  {"luma_kernel", to_string(cfg.luma_kernel)},
                  {"chroma_kernel", to_string(cfg.chroma_kernel)}};
  return fnv1a_hex(j.dump());
}

// Source geometry as an ERP spec on the 4:4:4 grid used between stages.
ProjectionSpec source_spec(const SequenceConfig& seq) {
  ProjectionSpec s = ProjectionSpec::from_name("erp");
  s.coded_geometry = {seq.geometry.width, seq.geometry.height, seq.geometry.bit_depth,
                      ChromaFormat::k444};
  return s;
}

ProjectionSpec coded_spec(const ProjectionSpec& format, const SequenceConfig& seq) {
  ProjectionSpec s = format;
  s.coded_geometry.bit_depth = seq.geometry.bit_depth;
  s.coded_geometry.chroma = ChromaFormat::k444;
  return s;
}

struct CellPlan {
  const SequenceConfig* sequence;
  const ProjectionSpec* format;
  int quality;
  std::string key;
};

std::vector<CellPlan> plan_cells(const RunConfig& cfg) {
  std::vector<CellPlan> plan;
  for (const auto& seq : cfg.sequences) {
    for (const auto& format : cfg.formats) {
      for (int q : cfg.quality_points) {
        plan.push_back({&seq, &format, q, cell_key(cfg, seq, format, q)});
      }
    }
  }
  return plan;
}

json manifest(const RunConfig& cfg, const std::vector<CellPlan>& plan) {
  json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["config"] = json::parse(dump_run_config(cfg));
  json defaults = json::object();
  for (Format f : {Format::kERP, Format::kAEP, Format::kCMP, Format::kEAC, Format::kHEC,
                   Format::kACP, Format::kGCP, Format::kECP}) {
    const FrameGeometry g = default_coded_geometry(f);
    defaults[to_string(f)] = {g.width, g.height};
  }
  j["default_coded_resolutions"] = defaults;
  // Dedicated layouts of other GCP/ISP variants; this build's GCP packs as a cube.
  j["reference_resolutions"] = {{"gcp", {1816, 1232}}, {"isp", {1306, 1672}}};
  json formats = json::array();
  for (const auto& f : cfg.formats) formats.push_back(format_label(f));
  j["report"] = {{"formats", formats},
                 {"bd_fit", to_string(cfg.bd_fit)},
                 {"rate_normalization", to_string(cfg.rate_normalization)},
                 {"sequence_pooling", to_string(cfg.pooling)}};
  j["cells"] = json::array();
  for (const auto& c : plan) {
    j["cells"].push_back({{"key", c.key},
                          {"sequence", c.sequence->name},
                          {"codec", cfg.codec.name},
                          {"format", format_label(*c.format)},
                          {"quality", c.quality}});
  }
  return j;
}

class Logger {
 public:
  explicit Logger(const std::function<void(const std::string&)>& sink) : sink_(sink) {}
  void operator()(const std::string& msg) {
    if (!sink_) return;
    std::lock_guard lock(mutex_);
    sink_(msg);
  }

 private:
  const std::function<void(const std::string&)>& sink_;
  std::mutex mutex_;
};

// Runs fn(i) for i in [0, n) on up to `workers` threads.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn fn) {
  const auto count = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(workers, 1)));
  if (count <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < count; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
}

}  // namespace

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string cell_key(const RunConfig& cfg, const SequenceConfig& seq, const ProjectionSpec& format,
                     int quality) {
  const CodecAdapter& c = cfg.codec;
  const json j = {{"sequence", sequence_identity(seq)},
                  {"name", seq.name},
                  {"format", format.key()},
                  {"quality", quality},
                  {"codec",
                   {{"name", c.name},
                    {"kind", to_string(c.kind)},
                    {"encode", c.encode_template},
                    {"decode", c.decode_template},
                    {"color_mode", to_string(c.color_mode)},
                    {"yuv_range", c.yuv_range == YuvRange::kLimited ? "limited" : "full"},
                    {"tool_dir", c.tool_dir},
                    {"gop", c.gop}}},
                  {"luma_kernel", to_string(cfg.luma_kernel)},
                  {"chroma_kernel", to_string(cfg.chroma_kernel)},
                  {"rate_normalization", to_string(cfg.rate_normalization)},
                  {"sequence_pooling", to_string(cfg.pooling)}};
  return fnv1a_hex(j.dump());
}

EvalReport run_pipeline(const RunConfig& cfg, const PipelineOptions& options) {
  validate(cfg);
  Logger log(options.log);
  const fs::path root = cfg.output_dir;
  std::error_code ec;
  fs::create_directories(root / "intermediate", ec);
  fs::create_directories(root / "cells", ec);
  OMNI360_REQUIRE(!ec, ErrorKind::kIo, "cannot create output directory '" + root.string() + "'");

  const auto plan = plan_cells(cfg);
  write_atomic(root / "manifest.json", manifest(cfg, plan).dump(2) + "\n");

  ResampleOptions ropts;
  ropts.luma = cfg.luma_kernel;
  ropts.chroma = cfg.chroma_kernel;
  const Resampler resampler(ropts);

  std::vector<CellResult> results;
  std::vector<FailedCell> failed;
  std::mutex results_mutex;

  for (const auto& seq : cfg.sequences) {
    std::vector<Frame> source;     // untouched, for metrics
    std::vector<Frame> source444;  // input to the forward resampler
    auto load_source = [&] {
      if (!source.empty()) return;
      log("reading " + seq.name);
      source = read_frames(open_sequence(seq.path, seq.geometry, seq.frame_rate), seq.first_frame,
                           seq.frames);
      for (const Frame& f : source) {
        source444.push_back(f.geometry.chroma == ChromaFormat::k420 ? chroma_420_to_444(f) : f);
      }
    };
    const ProjectionSpec src_spec = source_spec(seq);

    for (const auto& format : cfg.formats) {
      const std::string label = format_label(format);
      std::vector<const CellPlan*> pending;
      for (const auto& c : plan) {
        if (c.sequence != &seq || c.format != &format) continue;
        const fs::path result = root / "cells" / c.key / "result.json";
        if (fs::exists(result)) {
          const CellResult cached = cell_from_json(read_text(result));
          std::lock_guard lock(results_mutex);
          results.push_back(cached);
        } else {
          pending.push_back(&c);
        }
      }
      if (pending.empty()) {
        log(seq.name + " / " + label + ": cached");
        continue;
      }

      const ProjectionSpec dst_spec = coded_spec(format, seq);
      const fs::path inter_path =
          root / "intermediate" / (intermediate_key(cfg, seq, format) + ".yuv");
      std::vector<Frame> coded;
      if (fs::exists(inter_path)) {
        const auto cached = open_sequence(inter_path, dst_spec.coded_geometry, seq.frame_rate);
        if (cached.frame_count == seq.frames) coded = read_frames(cached, 0, seq.frames);
      }
      if (coded.empty()) {
        load_source();
        log(seq.name + " / " + label + ": resampling to " +
            std::to_string(dst_spec.coded_geometry.width) + "x" +
            std::to_string(dst_spec.coded_geometry.height));
        coded = resampler.resample(source444, src_spec, dst_spec);
        write_frames_atomic(coded, inter_path, seq.frame_rate);
      }
      load_source();

      parallel_for(pending.size(), cfg.parallelism, [&](std::size_t i) {
        const CellPlan& c = *pending[i];
        const fs::path cell_dir = root / "cells" / c.key;
        try {
          fs::create_directories(cell_dir);
          log(seq.name + " / " + label + " / q" + std::to_string(c.quality) + ": coding");
          CodecOutput out = run_codec(cfg.codec, coded, c.quality, seq.frame_rate, cell_dir / "work");
          std::vector<Frame> back = resampler.resample(out.recon, dst_spec, src_spec);
          if (seq.geometry.chroma == ChromaFormat::k420) {
            for (Frame& f : back) f = chroma_444_to_420(f);
          }
          write_frames_atomic(back, cell_dir / "recon_erp.yuv", seq.frame_rate);

          std::vector<QualityResult> per_frame;
          for (std::size_t n = 0; n < back.size(); ++n) {
            per_frame.push_back(measure_frame(source[n], back[n]));
          }
          CellResult r;
          r.sequence = seq.name;
          r.codec = cfg.codec.name;
          r.format = label;
          r.quality = c.quality;
          r.bits = out.bits;
          r.frames = seq.frames;
          const double pixels =
              cfg.rate_normalization == RateNormalization::kSourcePixels
                  ? static_cast<double>(seq.geometry.width) * seq.geometry.height
                  : static_cast<double>(dst_spec.coded_geometry.width) *
                        dst_spec.coded_geometry.height;
          r.rate_bpp = static_cast<double>(out.bits) / (pixels * seq.frames);
          r.metrics = cfg.pooling == SequencePooling::kMeanDb
                          ? aggregate_sequence(per_frame)
                          : aggregate_sequence_pooled(per_frame);
          // Round-trip through the cache format so fresh and cached runs agree.
          const std::string text = cell_to_json(r);
          r = cell_from_json(text);
          write_atomic(cell_dir / "result.json", text);
          fs::remove(cell_dir / "error.txt", ec);
          std::lock_guard lock(results_mutex);
          results.push_back(std::move(r));
        } catch (const std::exception& e) {
          log(seq.name + " / " + label + " / q" + std::to_string(c.quality) + ": FAILED: " +
              e.what());
          std::error_code ignore;
          fs::create_directories(cell_dir, ignore);
          std::ofstream(cell_dir / "error.txt") << e.what() << '\n';
          std::lock_guard lock(results_mutex);
          failed.push_back({seq.name, cfg.codec.name, label, c.quality, e.what()});
        }
      });
    }
  }

  // Failed cells in plan order keep the report deterministic.
  std::vector<FailedCell> ordered_failed;
  for (const auto& c : plan) {
    for (const auto& f : failed) {
      if (f.sequence == c.sequence->name && f.format == format_label(*c.format) &&
          f.quality == c.quality) {
        ordered_failed.push_back(f);
      }
    }
  }
  std::vector<std::string> labels;
  for (const auto& f : cfg.formats) labels.push_back(format_label(f));
  EvalReport report = build_report(std::move(results), std::move(ordered_failed), labels,
                                   cfg.bd_fit, cfg.rate_normalization, cfg.pooling);
  if (options.emit && !report.cells.empty()) emit_report(report, root);
  return report;
}

EvalReport load_cached_report(const fs::path& output_dir) {
  json m;
  try {
    m = json::parse(read_text(output_dir / "manifest.json"));
  } catch (const json::exception& e) {
    raise(ErrorKind::kPipelineState, std::string("corrupt manifest: ") + e.what());
  }
  std::vector<CellResult> cells;
  std::vector<FailedCell> failed;
  try {
    for (const auto& c : m.at("cells")) {
      const fs::path dir = output_dir / "cells" / c.at("key").get<std::string>();
      const std::string where = c.at("sequence").get<std::string>() + " / " +
                                c.at("format").get<std::string>() + " / q" +
                                std::to_string(c.at("quality").get<int>());
      if (fs::exists(dir / "result.json")) {
        cells.push_back(cell_from_json(read_text(dir / "result.json")));
      } else if (fs::exists(dir / "error.txt")) {
        std::string err = read_text(dir / "error.txt");
        while (!err.empty() && err.back() == '\n') err.pop_back();
        failed.push_back({c.at("sequence").get<std::string>(), c.at("codec").get<std::string>(),
                          c.at("format").get<std::string>(), c.at("quality").get<int>(), err});
      } else {
        raise(ErrorKind::kPipelineState, "cell " + where + " has no result; rerun the sweep");
      }
    }
    const json& r = m.at("report");
    const std::string norm = r.at("rate_normalization").get<std::string>();
    const std::string pooling = r.at("sequence_pooling").get<std::string>();
    return build_report(std::move(cells), std::move(failed),
                        r.at("formats").get<std::vector<std::string>>(),
                        parse_bd_fit(r.at("bd_fit").get<std::string>()),
                        norm == "coded-pixels" ? RateNormalization::kCodedPixels
                                               : RateNormalization::kSourcePixels,
                        pooling == "pooled-mse" ? SequencePooling::kPooledMse
                                                : SequencePooling::kMeanDb);
  } catch (const json::exception& e) {
    raise(ErrorKind::kPipelineState, std::string("corrupt manifest: ") + e.what());
  }
}

}  // namespace omni360
