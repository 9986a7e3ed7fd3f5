// Command-line front end over the C API.
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "omni360/omni360.h"

namespace {

// Process exit codes.
enum Exit {
  kExitOk = 0,
  kExitInternal = 1,
  kExitUsage = 2,
  kExitConfig = 3,
  kExitCodec = 4,
  kExitIo = 5,
  kExitData = 6,
  kExitPipelineState = 7,
};

int exit_code(o360_status s) {
  switch (s) {
    case O360_OK: return kExitOk;
    case O360_ERR_CONFIG: return kExitConfig;
    case O360_ERR_CODEC: return kExitCodec;
    case O360_ERR_IO: return kExitIo;
    case O360_ERR_PIPELINE_STATE: return kExitPipelineState;
    case O360_ERR_DOMAIN:
    case O360_ERR_CONTRACT:
    case O360_ERR_DATA:
    case O360_ERR_DISJOINT_CURVES:
    case O360_ERR_INSUFFICIENT_DATA: return kExitData;
    default: return kExitInternal;
  }
}

int report_failure(o360_status s) {
  std::fprintf(stderr, "omni360: %s: %s\n", o360_status_name(s), o360_last_error());
  return exit_code(s);
}

struct GeometryArgs {
  int width = 0;
  int height = 0;
  int bit_depth = 8;
  int chroma = 420;

  void add(CLI::App* app) {
    app->add_option("--width", width, "Frame width")->required();
    app->add_option("--height", height, "Frame height")->required();
    app->add_option("--bit-depth", bit_depth, "8 or 10")->check(CLI::IsMember({8, 10}));
    app->add_option("--chroma", chroma, "420 or 444")->check(CLI::IsMember({420, 444}));
  }
  o360_geometry get() const { return {width, height, bit_depth, chroma}; }
};

void log_line(const char* line, void*) { std::fprintf(stderr, "%s\n", line); }

void print_quality(const o360_quality& q, long long frames, bool json) {
  if (json) {
    std::printf(
        "{\"frames\": %lld, \"psnr_y\": %.6f, \"psnr_u\": %.6f, \"psnr_v\": %.6f, "
        "\"wspsnr_y\": %.6f, \"wspsnr_u\": %.6f, \"wspsnr_v\": %.6f, \"yuv_psnr\": %.6f, "
        "\"yuv_wspsnr\": %.6f, \"lossless\": %s}\n",
        frames, q.psnr_y, q.psnr_u, q.psnr_v, q.wspsnr_y, q.wspsnr_u, q.wspsnr_v, q.yuv_psnr,
        q.yuv_wspsnr, q.lossless ? "true" : "false");
    return;
  }
  std::printf("frames      %lld\n", frames);
  std::printf("PSNR    Y %.4f  U %.4f  V %.4f  YUV %.4f dB\n", q.psnr_y, q.psnr_u, q.psnr_v,
              q.yuv_psnr);
  std::printf("WS-PSNR Y %.4f  U %.4f  V %.4f  YUV %.4f dB\n", q.wspsnr_y, q.wspsnr_u,
              q.wspsnr_v, q.yuv_wspsnr);
  if (q.lossless) std::printf("lossless\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"omni360: 360-degree projection conversion, quality metrics and RD evaluation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(o360_version()));

  // convert
  auto* convert = app.add_subcommand("convert", "Resample a YUV file between projection formats");
  GeometryArgs conv_geom;
  std::string conv_in, conv_out, conv_from = "erp", conv_to, conv_kernel = "lanczos3";
  int conv_out_w = 0, conv_out_h = 0;
  long long conv_first = 0, conv_frames = -1;
  convert->add_option("-i,--input", conv_in, "Input YUV file")->required();
  convert->add_option("-o,--output", conv_out, "Output YUV file")->required();
  conv_geom.add(convert);
  convert->add_option("--from", conv_from, "Source format spec (erp, acp, gcp:a,b, ...)");
  convert->add_option("--to", conv_to, "Destination format spec")->required();
  convert->add_option("--out-width", conv_out_w, "Output width (default: format default)");
  convert->add_option("--out-height", conv_out_h, "Output height (default: format default)");
  convert->add_option("--kernel", conv_kernel, "nearest, bilinear, lanczosN");
  convert->add_option("--first", conv_first, "First frame");
  convert->add_option("--frames", conv_frames, "Frame count (default: all)");

  // metrics
  auto* metrics = app.add_subcommand("metrics", "PSNR and WS-PSNR between two ERP YUV files");
  GeometryArgs met_geom;
  std::string met_ref, met_test, met_pooling = "mean-db";
  long long met_frames = -1;
  bool met_json = false;
  metrics->add_option("--ref", met_ref, "Reference YUV file")->required();
  metrics->add_option("--test", met_test, "Test YUV file")->required();
  met_geom.add(metrics);
  metrics->add_option("--frames", met_frames, "Frames to compare (default: all)");
  metrics->add_option("--pooling", met_pooling, "mean-db or pooled-mse")
      ->check(CLI::IsMember({"mean-db", "pooled-mse"}));
  metrics->add_flag("--json", met_json, "Print JSON");

  // bd
  auto* bd = app.add_subcommand("bd", "BD-rate / BD-quality from RD curves in CSV");
  std::string bd_csv, bd_anchor, bd_fit = "piecewise-cubic";
  bd->add_option("csv", bd_csv, "CSV with header label,rate_bpp,quality_db")->required();
  bd->add_option("--anchor", bd_anchor, "Anchor curve label (default: first curve)");
  bd->add_option("--fit", bd_fit, "piecewise-cubic or cubic-poly")
      ->check(CLI::IsMember({"piecewise-cubic", "cubic-poly"}));

  // run
  auto* run = app.add_subcommand("run", "Run the evaluation sweep of a config file");
  std::string run_config, run_out;
  int run_parallelism = 0;
  bool run_quiet = false;
  run->add_option("config", run_config, "JSON run configuration")->required();
  run->add_option("--output-dir", run_out, "Override the configured output directory");
  run->add_option("-j,--parallelism", run_parallelism, "Concurrent cells")
      ->check(CLI::NonNegativeNumber);
  run->add_flag("-q,--quiet", run_quiet, "No progress output");

  // report
  auto* report = app.add_subcommand("report", "Re-emit report tables from a finished run");
  std::string rep_dir, rep_out, rep_formats = "csv,json,md";
  report->add_option("run_dir", rep_dir, "Output directory of a run")->required();
  report->add_option("--out", rep_out, "Directory for the report files (default: run_dir)");
  report->add_option("--formats", rep_formats, "Comma list of csv, json, md");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  if (*convert) {
    const o360_status s =
        o360_convert_file(conv_in.c_str(), conv_geom.get(), conv_from.c_str(), conv_to.c_str(),
                          conv_out_w, conv_out_h, conv_kernel.c_str(), conv_first, conv_frames,
                          conv_out.c_str());
    return s == O360_OK ? kExitOk : report_failure(s);
  }

  if (*metrics) {
    o360_quality q{};
    long long used = 0;
    const o360_status s =
        o360_metrics_files(met_ref.c_str(), met_test.c_str(), met_geom.get(), met_frames,
                           met_pooling == "pooled-mse", &q, &used);
    if (s != O360_OK) return report_failure(s);
    print_quality(q, used, met_json);
    return kExitOk;
  }

  if (*bd) {
    o360_curve_set* set = nullptr;
    o360_status s = o360_curves_load_csv(bd_csv.c_str(), &set);
    if (s != O360_OK) return report_failure(s);
    const size_t n = o360_curves_count(set);
    size_t anchor = 0;
    if (!bd_anchor.empty()) {
      anchor = n;
      for (size_t i = 0; i < n; ++i) {
        if (bd_anchor == o360_curves_label(set, i)) anchor = i;
      }
      if (anchor == n) {
        std::fprintf(stderr, "omni360: no curve labelled '%s'\n", bd_anchor.c_str());
        o360_curves_destroy(set);
        return kExitData;
      }
    }
    const o360_bd_fit fit =
        bd_fit == "cubic-poly" ? O360_FIT_CUBIC_POLY : O360_FIT_PIECEWISE_CUBIC;
    std::printf("anchor %s, fit %s\n", o360_curves_label(set, anchor), bd_fit.c_str());
    std::printf("%-16s %12s %12s %8s %s\n", "curve", "bd_rate_%", "bd_quality_dB", "iou", "flag");
    int rc = kExitOk;
    for (size_t i = 0; i < n; ++i) {
      o360_bd_result r{};
      s = o360_curves_bd(set, anchor, i, fit, &r);
      if (s != O360_OK) {
        std::printf("%-16s n/a (%s: %s)\n", o360_curves_label(set, i), o360_status_name(s),
                    o360_last_error());
        rc = exit_code(s);
        continue;
      }
      std::printf("%-16s %12.4f %12.4f %8.4f %s\n", o360_curves_label(set, i), r.bd_rate,
                  r.bd_quality, r.iou, r.flagged ? "*" : "");
    }
    o360_curves_destroy(set);
    return rc;
  }

  if (*run) {
    o360_report* rep = nullptr;
    const o360_status s =
        o360_run_config(run_config.c_str(), run_out.empty() ? nullptr : run_out.c_str(),
                        run_parallelism, run_quiet ? nullptr : log_line, nullptr, &rep);
    if (s != O360_OK) return report_failure(s);
    if (!run_quiet) std::fputs(o360_report_markdown(rep), stdout);
    const size_t cells = o360_report_cell_count(rep);
    const size_t failed = o360_report_failed_count(rep);
    o360_report_destroy(rep);
    if (failed > 0) {
      std::fprintf(stderr, "omni360: %zu of %zu cells failed\n", failed, cells + failed);
      return kExitCodec;
    }
    return kExitOk;
  }

  if (*report) {
    int mask = 0;
    std::stringstream list(rep_formats);
    for (std::string item; std::getline(list, item, ',');) {
      if (item == "csv") {
        mask |= O360_REPORT_CSV;
      } else if (item == "json") {
        mask |= O360_REPORT_JSON;
      } else if (item == "md") {
        mask |= O360_REPORT_MARKDOWN;
      } else {
        std::fprintf(stderr, "omni360: unknown report format '%s'\n", item.c_str());
        return kExitUsage;
      }
    }
    o360_report* rep = nullptr;
    o360_status s = o360_report_load(rep_dir.c_str(), &rep);
    if (s != O360_OK) return report_failure(s);
    s = o360_report_emit(rep, (rep_out.empty() ? rep_dir : rep_out).c_str(), mask);
    if (s == O360_OK) std::fputs(o360_report_markdown(rep), stdout);
    o360_report_destroy(rep);
    return s == O360_OK ? kExitOk : report_failure(s);
  }
  return kExitUsage;
}
