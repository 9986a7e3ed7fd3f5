#include "omni360/omni360.h"

#include <exception>
#include <string>

#include "omni360/config.hpp"
#include "omni360/error.hpp"
#include "omni360/metrics.hpp"
#include "omni360/pipeline.hpp"
#include "omni360/projection.hpp"
#include "omni360/rd_analysis.hpp"
#include "omni360/report.hpp"
#include "omni360/resample.hpp"
#include "omni360/yuv_io.hpp"

using namespace omni360;

struct o360_projection {
  ProjectionSpec spec;
};

struct o360_curve_set {
  std::vector<LabeledCurve> curves;
};

struct o360_report {
  EvalReport report;
  std::string markdown;
};

namespace {

thread_local std::string g_last_error;

o360_status fail(o360_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs fn and maps exceptions onto status codes.
template <typename Fn>
o360_status guarded(Fn fn) {
  try {
    fn();
    return O360_OK;
  } catch (const Error& e) {
    return fail(static_cast<o360_status>(static_cast<int>(e.kind())), e.what());
  } catch (const std::bad_alloc&) {
    return fail(O360_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(O360_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(O360_ERR_INTERNAL, "unknown failure");
  }
}

void require_arg(bool ok, const char* what) {
  OMNI360_REQUIRE(ok, ErrorKind::kContract, std::string("invalid argument: ") + what);
}

FrameGeometry to_geometry(const o360_geometry& g) {
  require_arg(g.chroma == 420 || g.chroma == 444, "chroma must be 420 or 444");
  FrameGeometry out{g.width, g.height, g.bit_depth,
                    g.chroma == 420 ? ChromaFormat::k420 : ChromaFormat::k444};
  validate(out);
  return out;
}

ProjectionSpec make_spec(const char* text, int width, int height) {
  require_arg(text != nullptr, "projection spec is NULL");
  ProjectionSpec spec = ProjectionSpec::parse(text);
  require_arg(width >= 0 && height >= 0, "negative size");
  if (width > 0) spec.coded_geometry.width = width;
  if (height > 0) spec.coded_geometry.height = height;
  validate(spec);
  return spec;
}

o360_quality to_c(const QualityResult& q) {
  return {q.psnr_y,   q.psnr_u,   q.psnr_v,   q.wspsnr_y,         q.wspsnr_u,
          q.wspsnr_v, q.yuv_psnr, q.yuv_wspsnr, q.lossless() ? 1 : 0};
}

BdFit to_fit(o360_bd_fit fit) {
  require_arg(fit == O360_FIT_CUBIC_POLY || fit == O360_FIT_PIECEWISE_CUBIC, "unknown BD fit");
  return fit == O360_FIT_CUBIC_POLY ? BdFit::kCubicPolynomial : BdFit::kPiecewiseCubic;
}

o360_bd_result to_c(const BdResult& r) { return {r.bd_rate, r.bd_quality, r.iou, r.flagged ? 1 : 0}; }

}  // namespace

extern "C" {

const char* o360_version(void) { return "1.0.0"; }

const char* o360_last_error(void) { return g_last_error.c_str(); }

const char* o360_status_name(o360_status status) {
  if (status == O360_OK) return "ok";
  if (status >= O360_ERR_DOMAIN && status <= O360_ERR_PIPELINE_STATE) {
    return to_string(static_cast<ErrorKind>(static_cast<int>(status)));
  }
  return "internal";
}

o360_status o360_projection_create(const char* spec, int width, int height,
                                   o360_projection** out) {
  return guarded([&] {
    require_arg(out != nullptr, "out is NULL");
    *out = new o360_projection{make_spec(spec, width, height)};
  });
}

void o360_projection_destroy(o360_projection* p) { delete p; }

o360_status o360_projection_size(const o360_projection* p, int* width, int* height) {
  return guarded([&] {
    require_arg(p && width && height, "NULL argument");
    *width = p->spec.coded_geometry.width;
    *height = p->spec.coded_geometry.height;
  });
}

o360_status o360_projection_forward(const o360_projection* p, double u, double v, double xyz[3]) {
  return guarded([&] {
    require_arg(p && xyz, "NULL argument");
    const Direction d = forward_map(p->spec, {u, v});
    xyz[0] = d.x;
    xyz[1] = d.y;
    xyz[2] = d.z;
  });
}

o360_status o360_projection_inverse(const o360_projection* p, const double xyz[3], double* u,
                                    double* v, int* face) {
  return guarded([&] {
    require_arg(p && xyz && u && v, "NULL argument");
    const InverseResult r = inverse_map(p->spec, Direction{xyz[0], xyz[1], xyz[2]});
    *u = r.uv.u;
    *v = r.uv.v;
    if (face) *face = r.face.face == Face::kF0 ? -1 : static_cast<int>(r.face.face);
  });
}

o360_status o360_convert_file(const char* in_path, o360_geometry in_geometry,
                              const char* src_spec, const char* dst_spec, int dst_width,
                              int dst_height, const char* kernel, long long first,
                              long long count, const char* out_path) {
  return guarded([&] {
    require_arg(in_path && out_path, "NULL path");
    const FrameGeometry g = to_geometry(in_geometry);
    ProjectionSpec src = make_spec(src_spec, g.width, g.height);
    src.coded_geometry.bit_depth = g.bit_depth;
    const ProjectionSpec dst = make_spec(dst_spec, dst_width, dst_height);
    if (g.chroma == ChromaFormat::k420) {
      OMNI360_REQUIRE(dst.coded_geometry.width % 2 == 0 && dst.coded_geometry.height % 2 == 0,
                      ErrorKind::kContract, "4:2:0 output needs even dimensions");
    }
    ResampleOptions opts;
    opts.luma = parse_kernel(kernel ? kernel : "lanczos3");
    opts.chroma = chroma_kernel_for(opts.luma);
    const Resampler resampler(opts);

    const SequenceHeaderless seq = open_sequence(in_path, g);
    require_arg(first >= 0 && first <= seq.frame_count, "first frame out of range");
    const long long n = count < 0 ? seq.frame_count - first : count;
    std::vector<Frame> frames = read_frames(seq, first, n);
    for (Frame& f : frames) {
      if (g.chroma == ChromaFormat::k420) f = chroma_420_to_444(f);
    }
    std::vector<Frame> out = resampler.resample(frames, src, dst);
    for (Frame& f : out) {
      if (g.chroma == ChromaFormat::k420) f = chroma_444_to_420(f);
    }
    write_frames(out, out_path);
  });
}

o360_status o360_metrics_files(const char* ref_path, const char* test_path,
                               o360_geometry geometry, long long frames, int pooled_mse,
                               o360_quality* out, long long* frames_used) {
  return guarded([&] {
    require_arg(ref_path && test_path && out, "NULL argument");
    const FrameGeometry g = to_geometry(geometry);
    const SequenceHeaderless ref = open_sequence(ref_path, g);
    const SequenceHeaderless test = open_sequence(test_path, g);
    const long long available = std::min(ref.frame_count, test.frame_count);
    const long long n = frames < 0 ? available : frames;
    OMNI360_REQUIRE(n >= 1, ErrorKind::kData, "no complete frames to compare");
    OMNI360_REQUIRE(n <= available, ErrorKind::kContract,
                    std::to_string(n) + " frames requested, " + std::to_string(available) +
                        " available");
    std::vector<QualityResult> per_frame;
    for (long long i = 0; i < n; ++i) {
      const auto a = read_frames(ref, i, 1);
      const auto b = read_frames(test, i, 1);
      per_frame.push_back(measure_frame(a.front(), b.front()));
    }
    *out = to_c(pooled_mse ? aggregate_sequence_pooled(per_frame) : aggregate_sequence(per_frame));
    if (frames_used) *frames_used = n;
  });
}

o360_status o360_bd_compute(const double* anchor_rate, const double* anchor_quality,
                            size_t anchor_count, const double* test_rate,
                            const double* test_quality, size_t test_count, o360_bd_fit fit,
                            o360_bd_result* out) {
  return guarded([&] {
    require_arg(anchor_rate && anchor_quality && test_rate && test_quality && out,
                "NULL argument");
    std::vector<RdPoint> a, t;
    for (size_t i = 0; i < anchor_count; ++i) a.push_back({anchor_rate[i], anchor_quality[i]});
    for (size_t i = 0; i < test_count; ++i) t.push_back({test_rate[i], test_quality[i]});
    *out = to_c(compute_bd(RdCurve(a), RdCurve(t), to_fit(fit)));
  });
}

o360_status o360_curves_load_csv(const char* path, o360_curve_set** out) {
  return guarded([&] {
    require_arg(path && out, "NULL argument");
    *out = new o360_curve_set{load_curves_csv(path)};
  });
}

void o360_curves_destroy(o360_curve_set* set) { delete set; }

size_t o360_curves_count(const o360_curve_set* set) { return set ? set->curves.size() : 0; }

const char* o360_curves_label(const o360_curve_set* set, size_t index) {
  if (!set || index >= set->curves.size()) return nullptr;
  return set->curves[index].label.c_str();
}

o360_status o360_curves_bd(const o360_curve_set* set, size_t anchor, size_t test,
                           o360_bd_fit fit, o360_bd_result* out) {
  return guarded([&] {
    require_arg(set && out, "NULL argument");
    require_arg(anchor < set->curves.size() && test < set->curves.size(), "curve index");
    *out = to_c(compute_bd(set->curves[anchor].curve, set->curves[test].curve, to_fit(fit)));
  });
}

o360_status o360_run_config(const char* config_path, const char* output_dir, int parallelism,
                            o360_log_fn log, void* user, o360_report** out) {
  return guarded([&] {
    require_arg(config_path != nullptr, "config path is NULL");
    require_arg(parallelism >= 0, "negative parallelism");
    RunConfig cfg = load_run_config(config_path);
    if (output_dir) cfg.output_dir = std::filesystem::absolute(output_dir).lexically_normal();
    if (parallelism > 0) cfg.parallelism = parallelism;
    PipelineOptions opts;
    if (log) opts.log = [log, user](const std::string& line) { log(line.c_str(), user); };
    EvalReport report = run_pipeline(cfg, opts);
    if (out) {
      auto* handle = new o360_report{std::move(report), {}};
      handle->markdown = report_markdown(handle->report);
      *out = handle;
    }
  });
}

o360_status o360_report_load(const char* run_dir, o360_report** out) {
  return guarded([&] {
    require_arg(run_dir && out, "NULL argument");
    auto* handle = new o360_report{load_cached_report(run_dir), {}};
    handle->markdown = report_markdown(handle->report);
    *out = handle;
  });
}

o360_status o360_report_emit(const o360_report* report, const char* dir, int formats) {
  return guarded([&] {
    require_arg(report && dir, "NULL argument");
    ReportFormats f;
    f.csv = (formats & O360_REPORT_CSV) != 0;
    f.json = (formats & O360_REPORT_JSON) != 0;
    f.markdown = (formats & O360_REPORT_MARKDOWN) != 0;
    emit_report(report->report, dir, f);
  });
}

size_t o360_report_cell_count(const o360_report* report) {
  return report ? report->report.cells.size() : 0;
}

size_t o360_report_failed_count(const o360_report* report) {
  return report ? report->report.failed.size() : 0;
}

const char* o360_report_markdown(const o360_report* report) {
  return report ? report->markdown.c_str() : "";
}

void o360_report_destroy(o360_report* report) { delete report; }

}  // extern "C"
