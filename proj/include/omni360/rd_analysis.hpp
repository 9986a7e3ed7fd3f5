#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace omni360 {

struct RdPoint {
  double rate = 0.0;     // bits per pixel, > 0
  double quality = 0.0;  // dB
};

// Rate-distortion curve. Points are sorted by rate on construction; after
// sorting both rate and quality must be strictly increasing, otherwise kData
// is thrown (non-monotone input is never repaired).
class RdCurve {
 public:
  RdCurve() = default;
  explicit RdCurve(std::vector<RdPoint> points);

  const std::vector<RdPoint>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  double min_quality() const { return points_.front().quality; }
  double max_quality() const { return points_.back().quality; }

 private:
  std::vector<RdPoint> points_;
};

enum class BdFit {
  kCubicPolynomial,  // least-squares cubic over all points
  kPiecewiseCubic,   // monotone piecewise cubic Hermite through the points
};

const char* to_string(BdFit fit);
BdFit parse_bd_fit(const std::string& name);

// Piecewise cubic y(x) with closed-form integration. A least-squares fit is a
// single piece spanning all samples.
class CurveFit {
 public:
  static CurveFit fit(std::span<const double> x, std::span<const double> y, BdFit mode);

  double evaluate(double x) const;
  // Exact integral over [a, b] using polynomial antiderivatives.
  double integrate(double a, double b) const;
  double x_min() const { return breaks_.front(); }
  double x_max() const { return breaks_.back(); }

 private:
  struct Piece {
    double origin;  // local variable tau = (x - origin) / scale
    double scale;
    double c[4];
  };
  std::size_t piece_index(double x) const;

  std::vector<double> breaks_;
  std::vector<Piece> pieces_;
};

// Average rate difference of test vs anchor at equal quality, in percent.
// Negative means the test curve needs less rate.
double bd_rate(const RdCurve& anchor, const RdCurve& test, BdFit fit = BdFit::kPiecewiseCubic);

// Average quality difference (dB) at equal rate; positive means test is better.
double bd_quality(const RdCurve& anchor, const RdCurve& test,
                  BdFit fit = BdFit::kPiecewiseCubic);

// Interval IoU of the curves' quality ranges.
double quality_iou(const RdCurve& a, const RdCurve& b);

inline constexpr double kIouFlagThreshold = 1.0 / 3.0;

struct BdResult {
  double bd_rate = 0.0;
  double bd_quality = 0.0;
  double iou = 0.0;
  bool flagged = false;  // iou < 1/3
};

BdResult compute_bd(const RdCurve& anchor, const RdCurve& test,
                    BdFit fit = BdFit::kPiecewiseCubic);

struct LabeledCurve {
  std::string label;
  RdCurve curve;
};

// CSV with header "label,rate_bpp,quality_db"; rows grouped by label in
// order of first appearance.
std::vector<LabeledCurve> load_curves_csv(const std::filesystem::path& path);
std::vector<LabeledCurve> parse_curves_csv(const std::string& text);

}  // namespace omni360
