#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "omni360/config.hpp"
#include "omni360/metrics.hpp"
#include "omni360/rd_analysis.hpp"

namespace omni360 {

// One completed (sequence, codec, format, quality) cell.
struct CellResult {
  std::string sequence;
  std::string codec;
  std::string format;  // format_label()
  int quality = 0;
  long long bits = 0;
  int frames = 0;
  double rate_bpp = 0.0;
  QualityResult metrics;
};

struct FailedCell {
  std::string sequence;
  std::string codec;
  std::string format;
  int quality = 0;
  std::string error;
};

enum class BdMetric { kYuvPsnr, kYuvWsPsnr };
const char* to_string(BdMetric m);

// BD of one format against the same codec's ERP curves, averaged over
// sequences. Unavailable when no sequence had usable curves.
struct BdEntry {
  std::string codec;
  BdMetric metric = BdMetric::kYuvPsnr;
  std::string format;
  bool available = false;
  BdResult result;  // mean bd_rate / bd_quality / iou; flagged if any sequence was
  int sequences = 0;
  std::string note;  // reason when unavailable
};

struct EvalReport {
  std::vector<std::string> formats;  // column order
  std::vector<CellResult> cells;
  std::vector<FailedCell> failed;
  std::vector<BdEntry> bd;
  BdFit bd_fit = BdFit::kPiecewiseCubic;
  RateNormalization rate_normalization = RateNormalization::kSourcePixels;
  SequencePooling pooling = SequencePooling::kMeanDb;
};

// Sorts cells into a canonical order and derives the BD tables. The anchor is
// the format labelled "erp"; without it, or with fewer than three usable
// points per curve, entries are unavailable.
EvalReport build_report(std::vector<CellResult> cells, std::vector<FailedCell> failed,
                        std::vector<std::string> formats, BdFit fit,
                        RateNormalization normalization, SequencePooling pooling);

struct ReportFormats {
  bool csv = true;
  bool json = true;
  bool markdown = true;
};

// Writes cells.csv / bd.csv, report.json and report.md into dir. Throws
// kContract on a report without completed cells.
void emit_report(const EvalReport& report, const std::filesystem::path& dir,
                 ReportFormats formats = {});

// Text renderings used by emit_report.
std::string report_cells_csv(const EvalReport& report);
std::string report_bd_csv(const EvalReport& report);
std::string report_json(const EvalReport& report);
std::string report_markdown(const EvalReport& report);

// Cell (de)serialisation shared with the pipeline's cell cache.
std::string cell_to_json(const CellResult& cell);
CellResult cell_from_json(const std::string& text);

}  // namespace omni360
