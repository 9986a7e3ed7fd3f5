#include "omni360/metrics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "omni360/error.hpp"

namespace omni360 {
namespace {

void check_same_shape(const Plane& a, const Plane& b) {
  OMNI360_REQUIRE(a.width == b.width && a.height == b.height &&
                      a.samples.size() == b.samples.size(),
                  ErrorKind::kContract,
                  "plane dimensions differ: " + std::to_string(a.width) + "x" +
                      std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                      std::to_string(b.height));
}

double to_db(double mse, int max_value) {
  if (mse <= 0.0) return std::numeric_limits<double>::infinity();
  const double peak = static_cast<double>(max_value);
  return 10.0 * std::log10(peak * peak / mse);
}

}  // namespace

double psnr_plane(const Plane& ref, const Plane& test, int max_value) {
  check_same_shape(ref, test);
  // Integer accumulation keeps the result exact and order independent.
  unsigned long long sse = 0;
  for (std::size_t k = 0; k < ref.samples.size(); ++k) {
    const long long e = static_cast<long long>(ref.samples[k]) - test.samples[k];
    sse += static_cast<unsigned long long>(e * e);
  }
  return to_db(static_cast<double>(sse) / static_cast<double>(ref.samples.size()), max_value);
}

double ws_weight_erp(int row, int height) {
  return std::cos((row + 0.5 - height / 2.0) * kPi / height);
}

double ws_psnr_plane(const Plane& ref, const Plane& test, int max_value) {
  std::vector<double> w(static_cast<std::size_t>(ref.height));
  for (int j = 0; j < ref.height; ++j) w[static_cast<std::size_t>(j)] = ws_weight_erp(j, ref.height);
  return ws_psnr_plane(ref, test, max_value, w);
}

double ws_psnr_plane(const Plane& ref, const Plane& test, int max_value,
                     std::span<const double> row_weights) {
  check_same_shape(ref, test);
  OMNI360_REQUIRE(row_weights.size() == static_cast<std::size_t>(ref.height), ErrorKind::kContract,
                  "one weight per row required");
  double weighted = 0.0;
  double total = 0.0;
  for (int j = 0; j < ref.height; ++j) {
    // Row SSE is exact in integers; only the weighting is floating point.
    unsigned long long sse = 0;
    const std::size_t base = static_cast<std::size_t>(j) * ref.width;
    for (int i = 0; i < ref.width; ++i) {
      const long long e = static_cast<long long>(ref.samples[base + i]) - test.samples[base + i];
      sse += static_cast<unsigned long long>(e * e);
    }
    const double w = row_weights[static_cast<std::size_t>(j)];
    weighted += w * static_cast<double>(sse);
    total += w * ref.width;
  }
  return to_db(weighted / total, max_value);
}

double combine_yuv(double py, double pu, double pv) { return (6.0 * py + pu + pv) / 8.0; }

double cap_db(double db) { return std::min(db, kLosslessDb); }

QualityResult measure_frame(const Frame& ref, const Frame& test) {
  OMNI360_REQUIRE(ref.geometry == test.geometry, ErrorKind::kContract,
                  "reference and test frames differ in geometry");
  const int max_value = ref.geometry.max_value();
  QualityResult q;
  q.psnr_y = cap_db(psnr_plane(ref.y(), test.y(), max_value));
  q.psnr_u = cap_db(psnr_plane(ref.u(), test.u(), max_value));
  q.psnr_v = cap_db(psnr_plane(ref.v(), test.v(), max_value));
  q.wspsnr_y = cap_db(ws_psnr_plane(ref.y(), test.y(), max_value));
  q.wspsnr_u = cap_db(ws_psnr_plane(ref.u(), test.u(), max_value));
  q.wspsnr_v = cap_db(ws_psnr_plane(ref.v(), test.v(), max_value));
  q.yuv_psnr = combine_yuv(q.psnr_y, q.psnr_u, q.psnr_v);
  q.yuv_wspsnr = combine_yuv(q.wspsnr_y, q.wspsnr_u, q.wspsnr_v);
  // Keep the sentinel exact when every component is lossless.
  if (q.psnr_y >= kLosslessDb && q.psnr_u >= kLosslessDb && q.psnr_v >= kLosslessDb) {
    q.yuv_psnr = q.yuv_wspsnr = kLosslessDb;
  }
  return q;
}

QualityResult aggregate_sequence(std::span<const QualityResult> per_frame) {
  OMNI360_REQUIRE(!per_frame.empty(), ErrorKind::kContract,
                  "cannot aggregate an empty frame list");
  auto mean = [&](double QualityResult::*field) {
    double sum = 0.0;
    for (const auto& q : per_frame) {
      if (q.*field >= kLosslessDb) return kLosslessDb;
      sum += q.*field;
    }
    return sum / static_cast<double>(per_frame.size());
  };
  QualityResult out;
  out.psnr_y = mean(&QualityResult::psnr_y);
  out.psnr_u = mean(&QualityResult::psnr_u);
  out.psnr_v = mean(&QualityResult::psnr_v);
  out.wspsnr_y = mean(&QualityResult::wspsnr_y);
  out.wspsnr_u = mean(&QualityResult::wspsnr_u);
  out.wspsnr_v = mean(&QualityResult::wspsnr_v);
  out.yuv_psnr = mean(&QualityResult::yuv_psnr);
  out.yuv_wspsnr = mean(&QualityResult::yuv_wspsnr);
  return out;
}

QualityResult aggregate_sequence_pooled(std::span<const QualityResult> per_frame) {
  OMNI360_REQUIRE(!per_frame.empty(), ErrorKind::kContract,
                  "cannot aggregate an empty frame list");
  // MSE relative to max^2; the peak cancels when converting back.
  auto pooled = [&](double QualityResult::*field) {
    double sum = 0.0;
    for (const auto& q : per_frame) {
      if (q.*field < kLosslessDb) sum += std::pow(10.0, -(q.*field) / 10.0);
    }
    if (sum == 0.0) return kLosslessDb;
    return cap_db(-10.0 * std::log10(sum / static_cast<double>(per_frame.size())));
  };
  QualityResult out;
  out.psnr_y = pooled(&QualityResult::psnr_y);
  out.psnr_u = pooled(&QualityResult::psnr_u);
  out.psnr_v = pooled(&QualityResult::psnr_v);
  out.wspsnr_y = pooled(&QualityResult::wspsnr_y);
  out.wspsnr_u = pooled(&QualityResult::wspsnr_u);
  out.wspsnr_v = pooled(&QualityResult::wspsnr_v);
  const bool lossless = out.psnr_y >= kLosslessDb && out.psnr_u >= kLosslessDb &&
                        out.psnr_v >= kLosslessDb;
  out.yuv_psnr = lossless ? kLosslessDb : combine_yuv(out.psnr_y, out.psnr_u, out.psnr_v);
  out.yuv_wspsnr = lossless ? kLosslessDb : combine_yuv(out.wspsnr_y, out.wspsnr_u, out.wspsnr_v);
  return out;
}

}  // namespace omni360
