#include "omni360/rd_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "omni360/error.hpp"

namespace omni360 {
namespace {

// Least squares for a small dense system via Householder QR. a is row-major
// rows x cols, overwritten.
std::vector<double> solve_least_squares(std::vector<double> a, std::vector<double> b, int rows,
                                        int cols) {
  auto at = [&](int r, int c) -> double& { return a[static_cast<std::size_t>(r * cols + c)]; };
  for (int k = 0; k < cols; ++k) {
    double norm = 0.0;
    for (int r = k; r < rows; ++r) norm += at(r, k) * at(r, k);
    norm = std::sqrt(norm);
    OMNI360_REQUIRE(norm > 0.0, ErrorKind::kInsufficientData, "rank-deficient curve fit");
    const double alpha = at(k, k) > 0 ? -norm : norm;
    std::vector<double> v(static_cast<std::size_t>(rows - k));
    for (int r = k; r < rows; ++r) v[static_cast<std::size_t>(r - k)] = at(r, k);
    v[0] -= alpha;
    double vnorm2 = 0.0;
    for (double x : v) vnorm2 += x * x;
    if (vnorm2 == 0.0) continue;
    for (int c = k; c < cols; ++c) {
      double d = 0.0;
      for (int r = k; r < rows; ++r) d += v[static_cast<std::size_t>(r - k)] * at(r, c);
      const double f = 2.0 * d / vnorm2;
      for (int r = k; r < rows; ++r) at(r, c) -= f * v[static_cast<std::size_t>(r - k)];
    }
    double d = 0.0;
    for (int r = k; r < rows; ++r) d += v[static_cast<std::size_t>(r - k)] * b[static_cast<std::size_t>(r)];
    const double f = 2.0 * d / vnorm2;
    for (int r = k; r < rows; ++r) b[static_cast<std::size_t>(r)] -= f * v[static_cast<std::size_t>(r - k)];
  }
  std::vector<double> x(static_cast<std::size_t>(cols));
  for (int k = cols - 1; k >= 0; --k) {
    double s = b[static_cast<std::size_t>(k)];
    for (int c = k + 1; c < cols; ++c) s -= at(k, c) * x[static_cast<std::size_t>(c)];
    x[static_cast<std::size_t>(k)] = s / at(k, k);
  }
  return x;
}

// Derivative at x[k] of the interpolating polynomial through x[first..last].
double lagrange_derivative(std::span<const double> x, std::span<const double> y, std::size_t first,
                           std::size_t last, std::size_t k) {
  double result = 0.0;
  const double xk = x[k];
  for (std::size_t j = first; j <= last; ++j) {
    double dl = 0.0;
    for (std::size_t l = first; l <= last; ++l) {
      if (l == j) continue;
      double term = 1.0 / (x[j] - x[l]);
      for (std::size_t m = first; m <= last; ++m) {
        if (m == j || m == l) continue;
        term *= (xk - x[m]) / (x[j] - x[m]);
      }
      dl += term;
    }
    result += y[j] * dl;
  }
  return result;
}

// Fritsch-Carlson: the Hermite cubic with scaled end slopes (alpha, beta) is
// monotone iff alpha, beta >= 0 and one of alpha + beta <= 2,
// 2 alpha + beta <= 3, alpha + 2 beta <= 3 or phi >= 0 holds.
bool hermite_monotone(double alpha, double beta) {
  if (alpha < 0.0 || beta < 0.0) return false;
  const double s = alpha + beta - 2.0;
  const double t = 2.0 * alpha + beta - 3.0;
  if (s <= 0.0 || t <= 0.0 || alpha + 2.0 * beta - 3.0 <= 0.0) return true;
  return alpha - t * t / (3.0 * s) >= 0.0;
}

std::vector<double> monotone_slopes(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  std::vector<double> m(n);
  std::vector<double> secant(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) secant[k] = (y[k + 1] - y[k]) / (x[k + 1] - x[k]);

  // Slopes of the local interpolating cubic (exact for cubic data).
  const std::size_t order = std::min<std::size_t>(n, 4);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t first = k >= 1 ? k - 1 : 0;
    first = std::min(first, n - order);
    m[k] = lagrange_derivative(x, y, first, first + order - 1, k);
  }

  // Zero slopes at extrema and where the estimate opposes the data.
  for (std::size_t k = 0; k < n; ++k) {
    const double left = k > 0 ? secant[k - 1] : secant[0];
    const double right = k + 1 < n ? secant[k] : secant[n - 2];
    if (left * right <= 0.0 || m[k] * left < 0.0 || m[k] * right < 0.0) m[k] = 0.0;
  }

  // Pull non-monotone segments back onto the alpha^2 + beta^2 <= 9 disc;
  // slopes only shrink, so a few sweeps settle.
  for (std::size_t sweep = 0; sweep < n; ++sweep) {
    bool changed = false;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const double d = secant[k];
      if (d == 0.0) {
        if (m[k] != 0.0 || m[k + 1] != 0.0) changed = true;
        m[k] = m[k + 1] = 0.0;
        continue;
      }
      const double alpha = m[k] / d, beta = m[k + 1] / d;
      if (!hermite_monotone(alpha, beta)) {
        const double tau = std::min(1.0, 3.0 / std::hypot(alpha, beta));
        m[k] = tau * alpha * d;
        m[k + 1] = tau * beta * d;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return m;
}

double antiderivative(const double c[4], double tau) {
  return tau * (c[0] + tau * (c[1] / 2.0 + tau * (c[2] / 3.0 + tau * c[3] / 4.0)));
}

void require_bd_inputs(const RdCurve& anchor, const RdCurve& test) {
  OMNI360_REQUIRE(anchor.size() >= 3 && test.size() >= 3, ErrorKind::kInsufficientData,
                  "BD computation needs at least 3 points per curve");
}

CurveFit fit_quality_to_lograte(const RdCurve& c, BdFit mode) {
  std::vector<double> x, y;
  for (const auto& p : c.points()) {
    x.push_back(p.quality);
    y.push_back(std::log10(p.rate));
  }
  return CurveFit::fit(x, y, mode);
}

CurveFit fit_lograte_to_quality(const RdCurve& c, BdFit mode) {
  std::vector<double> x, y;
  for (const auto& p : c.points()) {
    x.push_back(std::log10(p.rate));
    y.push_back(p.quality);
  }
  return CurveFit::fit(x, y, mode);
}

// Mean of (test - anchor) over the shared x interval.
double mean_difference(const CurveFit& anchor, const CurveFit& test, const char* axis) {
  const double lo = std::max(anchor.x_min(), test.x_min());
  const double hi = std::min(anchor.x_max(), test.x_max());
  OMNI360_REQUIRE(hi > lo, ErrorKind::kDisjointCurves,
                  std::string("curves do not overlap along the ") + axis + " axis");
  return (test.integrate(lo, hi) - anchor.integrate(lo, hi)) / (hi - lo);
}

}  // namespace

//------------------------------------------------------------------------------

RdCurve::RdCurve(std::vector<RdPoint> points) : points_(std::move(points)) {
  OMNI360_REQUIRE(!points_.empty(), ErrorKind::kData, "empty RD curve");
  for (const auto& p : points_) {
    OMNI360_REQUIRE(p.rate > 0.0 && std::isfinite(p.rate) && std::isfinite(p.quality),
                    ErrorKind::kData, "RD points need a positive finite rate and finite quality");
  }
  std::sort(points_.begin(), points_.end(),
            [](const RdPoint& a, const RdPoint& b) { return a.rate < b.rate; });
  for (std::size_t k = 1; k < points_.size(); ++k) {
    OMNI360_REQUIRE(points_[k].rate > points_[k - 1].rate, ErrorKind::kData,
                    "RD curve has duplicate rates");
    OMNI360_REQUIRE(points_[k].quality > points_[k - 1].quality, ErrorKind::kData,
                    "RD curve quality is not strictly increasing with rate");
  }
}

const char* to_string(BdFit fit) {
  return fit == BdFit::kCubicPolynomial ? "cubic-poly" : "piecewise-cubic";
}

BdFit parse_bd_fit(const std::string& name) {
  if (name == "cubic-poly") return BdFit::kCubicPolynomial;
  if (name == "piecewise-cubic") return BdFit::kPiecewiseCubic;
  raise(ErrorKind::kConfig, "unknown BD fit '" + name + "'");
}

CurveFit CurveFit::fit(std::span<const double> x, std::span<const double> y, BdFit mode) {
  OMNI360_REQUIRE(x.size() == y.size() && x.size() >= 2, ErrorKind::kInsufficientData,
                  "curve fit needs at least two samples");
  for (std::size_t k = 1; k < x.size(); ++k) {
    OMNI360_REQUIRE(x[k] > x[k - 1], ErrorKind::kData, "fit abscissae must increase strictly");
  }
  CurveFit f;
  const std::size_t n = x.size();
  if (mode == BdFit::kCubicPolynomial) {
    const int cols = static_cast<int>(std::min<std::size_t>(n, 4));
    const double origin = 0.5 * (x.front() + x.back());
    const double scale = 0.5 * (x.back() - x.front());
    std::vector<double> a(n * static_cast<std::size_t>(cols));
    for (std::size_t r = 0; r < n; ++r) {
      const double tau = (x[r] - origin) / scale;
      double p = 1.0;
      for (int c = 0; c < cols; ++c) {
        a[r * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c)] = p;
        p *= tau;
      }
    }
    const auto coeffs =
        solve_least_squares(std::move(a), {y.begin(), y.end()}, static_cast<int>(n), cols);
    Piece piece{origin, scale, {0, 0, 0, 0}};
    for (int c = 0; c < cols; ++c) piece.c[c] = coeffs[static_cast<std::size_t>(c)];
    f.breaks_ = {x.front(), x.back()};
    f.pieces_ = {piece};
    return f;
  }
  const auto m = monotone_slopes(x, y);
  f.breaks_.assign(x.begin(), x.end());
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double h = x[k + 1] - x[k];
    const double delta = y[k + 1] - y[k];
    const double d0 = m[k] * h, d1 = m[k + 1] * h;
    f.pieces_.push_back(
        {x[k], h, {y[k], d0, 3.0 * delta - 2.0 * d0 - d1, d0 + d1 - 2.0 * delta}});
  }
  return f;
}

std::size_t CurveFit::piece_index(double x) const {
  const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
  const auto idx = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - breaks_.begin() - 1, 0));
  return std::min(idx, pieces_.size() - 1);
}

double CurveFit::evaluate(double x) const {
  const Piece& p = pieces_[piece_index(x)];
  const double t = (x - p.origin) / p.scale;
  return p.c[0] + t * (p.c[1] + t * (p.c[2] + t * p.c[3]));
}

double CurveFit::integrate(double a, double b) const {
  if (b < a) return -integrate(b, a);
  double total = 0.0;
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    const bool first = k == 0, last = k + 1 == pieces_.size();
    const double lo = first ? a : std::max(a, breaks_[k]);
    const double hi = last ? b : std::min(b, breaks_[k + 1]);
    if (hi <= lo) continue;
    const Piece& p = pieces_[k];
    total += p.scale * (antiderivative(p.c, (hi - p.origin) / p.scale) -
                        antiderivative(p.c, (lo - p.origin) / p.scale));
  }
  return total;
}

double bd_rate(const RdCurve& anchor, const RdCurve& test, BdFit fit) {
  require_bd_inputs(anchor, test);
  const double diff = mean_difference(fit_quality_to_lograte(anchor, fit),
                                      fit_quality_to_lograte(test, fit), "quality");
  return (std::pow(10.0, diff) - 1.0) * 100.0;
}

double bd_quality(const RdCurve& anchor, const RdCurve& test, BdFit fit) {
  require_bd_inputs(anchor, test);
  return mean_difference(fit_lograte_to_quality(anchor, fit), fit_lograte_to_quality(test, fit),
                         "rate");
}

double quality_iou(const RdCurve& a, const RdCurve& b) {
  const double lo = std::max(a.min_quality(), b.min_quality());
  const double hi = std::min(a.max_quality(), b.max_quality());
  const double union_len =
      std::max(a.max_quality(), b.max_quality()) - std::min(a.min_quality(), b.min_quality());
  if (union_len <= 0.0) return lo <= hi ? 1.0 : 0.0;
  return std::max(0.0, hi - lo) / union_len;
}

BdResult compute_bd(const RdCurve& anchor, const RdCurve& test, BdFit fit) {
  BdResult r;
  r.bd_rate = bd_rate(anchor, test, fit);
  r.bd_quality = bd_quality(anchor, test, fit);
  r.iou = quality_iou(anchor, test);
  r.flagged = r.iou < kIouFlagThreshold;
  return r;
}

//------------------------------------------------------------------------------

std::vector<LabeledCurve> parse_curves_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> order;
  std::map<std::string, std::vector<RdPoint>> groups;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      const auto b = cell.find_first_not_of(" \t");
      const auto e = cell.find_last_not_of(" \t");
      cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    if (!header_seen) {
      header_seen = true;
      OMNI360_REQUIRE(cells.size() == 3 && cells[0] == "label" && cells[1] == "rate_bpp" &&
                          cells[2] == "quality_db",
                      ErrorKind::kData, "curve CSV header must be 'label,rate_bpp,quality_db'");
      continue;
    }
    OMNI360_REQUIRE(cells.size() == 3, ErrorKind::kData,
                    "curve CSV line " + std::to_string(line_no) + ": expected 3 columns");
    RdPoint p;
    try {
      std::size_t used_r = 0, used_q = 0;
      p.rate = std::stod(cells[1], &used_r);
      p.quality = std::stod(cells[2], &used_q);
      if (used_r != cells[1].size() || used_q != cells[2].size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      raise(ErrorKind::kData, "curve CSV line " + std::to_string(line_no) + ": bad number");
    }
    if (!groups.contains(cells[0])) order.push_back(cells[0]);
    groups[cells[0]].push_back(p);
  }
  std::vector<LabeledCurve> out;
  for (const auto& label : order) {
    try {
      out.push_back({label, RdCurve(groups[label])});
    } catch (const Error& e) {
      raise(e.kind(), "curve '" + label + "': " + e.what());
    }
  }
  return out;
}

std::vector<LabeledCurve> load_curves_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  OMNI360_REQUIRE(in.good(), ErrorKind::kIo, "cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_curves_csv(ss.str());
}

}  // namespace omni360
