#include "omni360/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "omni360/error.hpp"

namespace omni360 {
namespace {

using nlohmann::json;

constexpr const char* kAnchorFormat = "erp";
constexpr std::size_t kMinBdPoints = 3;

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

double metric_of(const CellResult& c, BdMetric m) {
  return m == BdMetric::kYuvPsnr ? c.metrics.yuv_psnr : c.metrics.yuv_wspsnr;
}

// Usable RD points of one (sequence, codec, format): lossless and zero-rate
// points carry no BD information.
std::vector<RdPoint> curve_points(const std::vector<const CellResult*>& cells, BdMetric m) {
  std::vector<RdPoint> pts;
  for (const CellResult* c : cells) {
    const double q = metric_of(*c, m);
    if (q >= kLosslessDb || c->rate_bpp <= 0.0) continue;
    pts.push_back({c->rate_bpp, q});
  }
  return pts;
}

json quality_json(const QualityResult& q) {
  return {{"psnr_y", q.psnr_y},     {"psnr_u", q.psnr_u},         {"psnr_v", q.psnr_v},
          {"wspsnr_y", q.wspsnr_y}, {"wspsnr_u", q.wspsnr_u},     {"wspsnr_v", q.wspsnr_v},
          {"yuv_psnr", q.yuv_psnr}, {"yuv_wspsnr", q.yuv_wspsnr}, {"lossless", q.lossless()}};
}

json cell_json(const CellResult& c) {
  return {{"sequence", c.sequence}, {"codec", c.codec},   {"format", c.format},
          {"quality", c.quality},   {"bits", c.bits},     {"frames", c.frames},
          {"rate_bpp", c.rate_bpp}, {"metrics", quality_json(c.metrics)}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  OMNI360_REQUIRE(out.good(), ErrorKind::kIo, "cannot write '" + path.string() + "'");
  out << text;
  OMNI360_REQUIRE(out.good(), ErrorKind::kIo, "write to '" + path.string() + "' failed");
}

}  // namespace

const char* to_string(BdMetric m) { return m == BdMetric::kYuvPsnr ? "yuv_psnr" : "yuv_wspsnr"; }

EvalReport build_report(std::vector<CellResult> cells, std::vector<FailedCell> failed,
                        std::vector<std::string> formats, BdFit fit,
                        RateNormalization normalization, SequencePooling pooling) {
  EvalReport r;
  r.bd_fit = fit;
  r.rate_normalization = normalization;
  r.pooling = pooling;
  for (const auto& c : cells) {
    if (std::find(formats.begin(), formats.end(), c.format) == formats.end()) {
      formats.push_back(c.format);
    }
  }
  r.formats = std::move(formats);

  std::vector<std::string> sequences, codecs;
  auto note_order = [](std::vector<std::string>& order, const std::string& s) {
    if (std::find(order.begin(), order.end(), s) == order.end()) order.push_back(s);
  };
  for (const auto& c : cells) {
    note_order(sequences, c.sequence);
    note_order(codecs, c.codec);
  }
  auto rank = [](const std::vector<std::string>& order, const std::string& s) {
    return std::find(order.begin(), order.end(), s) - order.begin();
  };
  std::stable_sort(cells.begin(), cells.end(), [&](const CellResult& a, const CellResult& b) {
    const auto ka = std::make_tuple(rank(sequences, a.sequence), rank(codecs, a.codec),
                                    rank(r.formats, a.format), a.quality);
    const auto kb = std::make_tuple(rank(sequences, b.sequence), rank(codecs, b.codec),
                                    rank(r.formats, b.format), b.quality);
    return ka < kb;
  });
  r.cells = std::move(cells);
  r.failed = std::move(failed);

  const bool has_anchor =
      std::find(r.formats.begin(), r.formats.end(), kAnchorFormat) != r.formats.end();
  for (const auto& codec : codecs) {
    for (BdMetric metric : {BdMetric::kYuvPsnr, BdMetric::kYuvWsPsnr}) {
      for (const auto& format : r.formats) {
        BdEntry e;
        e.codec = codec;
        e.metric = metric;
        e.format = format;
        if (!has_anchor) {
          e.note = "no erp anchor";
          r.bd.push_back(e);
          continue;
        }
        double sum_rate = 0, sum_quality = 0, sum_iou = 0;
        bool flagged = false;
        for (const auto& seq : sequences) {
          std::vector<const CellResult*> anchor_cells, test_cells;
          for (const auto& c : r.cells) {
            if (c.sequence != seq || c.codec != codec) continue;
            if (c.format == kAnchorFormat) anchor_cells.push_back(&c);
            if (c.format == format) test_cells.push_back(&c);
          }
          const auto anchor_pts = curve_points(anchor_cells, metric);
          const auto test_pts = curve_points(test_cells, metric);
          if (anchor_pts.size() < kMinBdPoints || test_pts.size() < kMinBdPoints) {
            e.note = seq + ": fewer than 3 lossy points";
            break;
          }
          try {
            const BdResult bd = compute_bd(RdCurve(anchor_pts), RdCurve(test_pts), fit);
            sum_rate += bd.bd_rate;
            sum_quality += bd.bd_quality;
            sum_iou += bd.iou;
            flagged = flagged || bd.flagged;
            ++e.sequences;
          } catch (const Error& err) {
            e.note = seq + ": " + err.what();
            break;
          }
        }
        if (e.note.empty() && e.sequences > 0) {
          const double n = e.sequences;
          e.available = true;
          e.result = {sum_rate / n, sum_quality / n, sum_iou / n, flagged};
        } else {
          e.sequences = 0;
        }
        r.bd.push_back(e);
      }
    }
  }
  return r;
}

std::string report_cells_csv(const EvalReport& r) {
  std::ostringstream os;
  os << "sequence,codec,format,quality,frames,bits,rate_bpp,psnr_y,psnr_u,psnr_v,"
        "wspsnr_y,wspsnr_u,wspsnr_v,yuv_psnr,yuv_wspsnr,lossless\n";
  for (const auto& c : r.cells) {
    const auto& m = c.metrics;
    os << c.sequence << ',' << c.codec << ',' << c.format << ',' << c.quality << ',' << c.frames
       << ',' << c.bits << ',' << fmt("%.9f", c.rate_bpp);
    for (double v : {m.psnr_y, m.psnr_u, m.psnr_v, m.wspsnr_y, m.wspsnr_u, m.wspsnr_v, m.yuv_psnr,
                     m.yuv_wspsnr}) {
      os << ',' << fmt("%.6f", v);
    }
    os << ',' << (m.lossless() ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string report_bd_csv(const EvalReport& r) {
  std::ostringstream os;
  os << "codec,metric,format,available,bd_rate_pct,bd_quality_db,iou,flag,sequences,note\n";
  for (const auto& e : r.bd) {
    os << e.codec << ',' << to_string(e.metric) << ',' << e.format << ',' << (e.available ? 1 : 0);
    if (e.available) {
      os << ',' << fmt("%.6f", e.result.bd_rate) << ',' << fmt("%.6f", e.result.bd_quality) << ','
         << fmt("%.6f", e.result.iou) << ',' << (e.result.flagged ? "*" : "");
    } else {
      os << ",,,,";
    }
    std::string note = e.note;
    std::replace(note.begin(), note.end(), ',', ';');
    std::replace(note.begin(), note.end(), '\n', ' ');
    os << ',' << e.sequences << ',' << note << '\n';
  }
  return os.str();
}

std::string report_json(const EvalReport& r) {
  json j;
  j["rate_normalization"] = to_string(r.rate_normalization);
  j["sequence_pooling"] = to_string(r.pooling);
  j["bd_fit"] = to_string(r.bd_fit);
  j["anchor"] = kAnchorFormat;
  j["formats"] = r.formats;
  j["cells"] = json::array();
  for (const auto& c : r.cells) j["cells"].push_back(cell_json(c));
  j["failed_cells"] = json::array();
  for (const auto& f : r.failed) {
    j["failed_cells"].push_back({{"sequence", f.sequence},
                                 {"codec", f.codec},
                                 {"format", f.format},
                                 {"quality", f.quality},
                                 {"error", f.error}});
  }
  j["bd"] = json::array();
  for (const auto& e : r.bd) {
    json b = {{"codec", e.codec},
              {"metric", to_string(e.metric)},
              {"format", e.format},
              {"available", e.available},
              {"sequences", e.sequences}};
    if (e.available) {
      b["bd_rate_pct"] = e.result.bd_rate;
      b["bd_quality_db"] = e.result.bd_quality;
      b["iou"] = e.result.iou;
      b["flagged"] = e.result.flagged;
    } else {
      b["note"] = e.note;
    }
    j["bd"].push_back(b);
  }
  return j.dump(2) + "\n";
}

std::string report_markdown(const EvalReport& r) {
  std::ostringstream os;
  os << "# Evaluation report\n\n";
  os << "Rate is bitstream bits per "
     << (r.rate_normalization == RateNormalization::kSourcePixels ? "source ERP" : "coded-format")
     << " pixel per frame (bpp). Sequence quality pooling: " << to_string(r.pooling)
     << ". BD fit: " << to_string(r.bd_fit) << ". Lossless values are shown as "
     << fmt("%.2f", kLosslessDb) << ".\n\n";

  os << "## Cells\n\n";
  os << "| sequence | codec | format | q | rate (bpp) | YUV-PSNR (dB) | YUV-WS-PSNR (dB) |\n";
  os << "|---|---|---|---:|---:|---:|---:|\n";
  for (const auto& c : r.cells) {
    os << "| " << c.sequence << " | " << c.codec << " | " << c.format << " | " << c.quality
       << " | " << fmt("%.6f", c.rate_bpp) << " | " << fmt("%.4f", c.metrics.yuv_psnr) << " | "
       << fmt("%.4f", c.metrics.yuv_wspsnr) << " |\n";
  }
  if (!r.failed.empty()) {
    os << "\n## Failed cells\n\n| sequence | codec | format | q | error |\n|---|---|---|---:|---|\n";
    for (const auto& f : r.failed) {
      std::string err = f.error.substr(0, f.error.find('\n'));
      std::replace(err.begin(), err.end(), '|', '/');
      os << "| " << f.sequence << " | " << f.codec << " | " << f.format << " | " << f.quality
         << " | " << err << " |\n";
    }
  }

  bool any_available = false;
  for (const auto& e : r.bd) any_available = any_available || e.available;
  if (!any_available) {
    os << "\nBD tables unavailable (need an erp anchor and at least 3 lossy points per curve).\n";
    return os.str();
  }
  std::vector<std::string> codecs;
  for (const auto& e : r.bd) {
    if (std::find(codecs.begin(), codecs.end(), e.codec) == codecs.end()) codecs.push_back(e.codec);
  }
  for (const auto& codec : codecs) {
    os << "\n## BD-rate vs erp: " << codec << "\n\n";
    os << "| metric |";
    for (const auto& f : r.formats) os << ' ' << f << " | |";
    os << "\n|---|";
    for (std::size_t i = 0; i < r.formats.size(); ++i) os << "---:|:-:|";
    os << '\n';
    for (BdMetric metric : {BdMetric::kYuvPsnr, BdMetric::kYuvWsPsnr}) {
      os << "| " << to_string(metric) << " |";
      for (const auto& f : r.formats) {
        const auto it = std::find_if(r.bd.begin(), r.bd.end(), [&](const BdEntry& e) {
          return e.codec == codec && e.metric == metric && e.format == f;
        });
        if (it == r.bd.end() || !it->available) {
          os << " n/a | |";
        } else {
          os << ' ' << fmt("%.2f", it->result.bd_rate) << " | " << (it->result.flagged ? "*" : "")
             << " |";
        }
      }
      os << '\n';
    }
  }
  os << "\n`*`: quality-range IoU of the curves below 1/3; the BD value is unreliable.\n";
  return os.str();
}

void emit_report(const EvalReport& report, const std::filesystem::path& dir,
                 ReportFormats formats) {
  OMNI360_REQUIRE(!report.cells.empty(), ErrorKind::kContract, "report has no completed cells");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  OMNI360_REQUIRE(!ec, ErrorKind::kIo, "cannot create '" + dir.string() + "'");
  if (formats.csv) {
    write_text(dir / "cells.csv", report_cells_csv(report));
    write_text(dir / "bd.csv", report_bd_csv(report));
  }
  if (formats.json) write_text(dir / "report.json", report_json(report));
  if (formats.markdown) write_text(dir / "report.md", report_markdown(report));
}

std::string cell_to_json(const CellResult& cell) { return cell_json(cell).dump(2) + "\n"; }

CellResult cell_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    CellResult c;
    c.sequence = j.at("sequence").get<std::string>();
    c.codec = j.at("codec").get<std::string>();
    c.format = j.at("format").get<std::string>();
    c.quality = j.at("quality").get<int>();
    c.bits = j.at("bits").get<long long>();
    c.frames = j.at("frames").get<int>();
    c.rate_bpp = j.at("rate_bpp").get<double>();
    const json& m = j.at("metrics");
    c.metrics.psnr_y = m.at("psnr_y").get<double>();
    c.metrics.psnr_u = m.at("psnr_u").get<double>();
    c.metrics.psnr_v = m.at("psnr_v").get<double>();
    c.metrics.wspsnr_y = m.at("wspsnr_y").get<double>();
    c.metrics.wspsnr_u = m.at("wspsnr_u").get<double>();
    c.metrics.wspsnr_v = m.at("wspsnr_v").get<double>();
    c.metrics.yuv_psnr = m.at("yuv_psnr").get<double>();
    c.metrics.yuv_wspsnr = m.at("yuv_wspsnr").get<double>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorKind::kPipelineState, std::string("corrupt cell result: ") + e.what());
  }
}

}  // namespace omni360
