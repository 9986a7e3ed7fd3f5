#pragma once

#include <span>
#include <vector>

#include "omni360/frame.hpp"

namespace omni360 {

// Lossless results are reported as this value (and flagged), which keeps
// tables and averages finite.
inline constexpr double kLosslessDb = 999.99;

// 10 log10(max^2 / MSE); +infinity for identical planes.
double psnr_plane(const Plane& ref, const Plane& test, int max_value);

// ERP row weight cos((j + 0.5 - H/2) * pi / H).
double ws_weight_erp(int row, int height);

// Weighted PSNR with the ERP row weights of the plane's own height.
double ws_psnr_plane(const Plane& ref, const Plane& test, int max_value);
// Same with caller-supplied per-row weights (size == plane height).
double ws_psnr_plane(const Plane& ref, const Plane& test, int max_value,
                     std::span<const double> row_weights);

// (6 py + pu + pv) / 8
double combine_yuv(double py, double pu, double pv);

struct QualityResult {
  double psnr_y = 0, psnr_u = 0, psnr_v = 0;
  double wspsnr_y = 0, wspsnr_u = 0, wspsnr_v = 0;
  double yuv_psnr = 0;
  double yuv_wspsnr = 0;

  bool lossless() const { return yuv_psnr >= kLosslessDb; }
};

// Caps infinite values at kLosslessDb.
double cap_db(double db);

// Per-frame metrics of test against ref; geometries must match.
QualityResult measure_frame(const Frame& ref, const Frame& test);

// Mean of each dB field. A field capped in any frame stays capped.
QualityResult aggregate_sequence(std::span<const QualityResult> per_frame);

// dB of the mean per-frame MSE for each component; the YUV fields combine
// the pooled components. Lossless only when every frame is lossless.
QualityResult aggregate_sequence_pooled(std::span<const QualityResult> per_frame);

}  // namespace omni360
