#pragma once

#include <filesystem>
#include <functional>
#include <string>

#include "omni360/config.hpp"
#include "omni360/report.hpp"

namespace omni360 {

struct PipelineOptions {
  // Progress messages, one line each. Called from worker threads under a lock.
  std::function<void(const std::string&)> log;
  // Write report files into the output directory after the sweep.
  bool emit = true;
};

// Runs every (sequence, format, quality) cell of cfg. Layout under
// cfg.output_dir:
//   manifest.json                 canonical config and cell list
//   intermediate/<key>.yuv        source resampled to the coded format
//   cells/<key>/result.json       completed cell (skipped on rerun)
//   cells/<key>/recon_erp.yuv     decoded frames back on the source grid
//   cells/<key>/work/             codec files and logs
//   cells.csv bd.csv report.json report.md
// A failing cell is recorded in the report and the sweep continues.
EvalReport run_pipeline(const RunConfig& cfg, const PipelineOptions& options = {});

// Rebuilds the report of a finished run from its manifest and cell results.
// Throws kPipelineState when the manifest or a cell result is missing.
EvalReport load_cached_report(const std::filesystem::path& output_dir);

// Content key of a cell; changes whenever anything affecting its result does.
std::string cell_key(const RunConfig& cfg, const SequenceConfig& seq, const ProjectionSpec& format,
                     int quality);

// 64-bit FNV-1a as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

}  // namespace omni360
