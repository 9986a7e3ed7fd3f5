#include "omni360/sphere.hpp"

#include <string>

#include "omni360/error.hpp"

namespace omni360 {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDomain: return "domain error";
    case ErrorKind::kContract: return "contract error";
    case ErrorKind::kIo: return "I/O error";
    case ErrorKind::kData: return "data error";
    case ErrorKind::kDisjointCurves: return "disjoint curves";
    case ErrorKind::kInsufficientData: return "insufficient data";
    case ErrorKind::kConfig: return "config error";
    case ErrorKind::kCodec: return "codec error";
    case ErrorKind::kPipelineState: return "pipeline state error";
  }
  return "unknown error";
}

Direction normalized(double x, double y, double z) {
  const double n = std::sqrt(x * x + y * y + z * z);
  OMNI360_REQUIRE(n > 0.0 && std::isfinite(n), ErrorKind::kDomain,
                  "cannot normalize a zero or non-finite vector");
  return {x / n, y / n, z / n};
}

double angle_between(const Direction& a, const Direction& b) {
  const double cx = a.y * b.z - a.z * b.y;
  const double cy = a.z * b.x - a.x * b.z;
  const double cz = a.x * b.y - a.y * b.x;
  return std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), a.dot(b));
}

double wrap_longitude(double lon) {
  double w = std::fmod(lon + kPi, 2.0 * kPi);
  if (w < 0.0) w += 2.0 * kPi;
  w -= kPi;
  // fmod can land exactly on +pi after the shift for inputs like -pi - tiny.
  return w >= kPi ? -kPi : w;
}

Direction lonlat_to_direction(LonLat p) {
  OMNI360_REQUIRE(std::isfinite(p.lon) && std::isfinite(p.lat), ErrorKind::kDomain,
                  "non-finite longitude/latitude");
  OMNI360_REQUIRE(std::abs(p.lat) <= kPi / 2, ErrorKind::kDomain,
                  "latitude " + std::to_string(p.lat) + " outside [-pi/2, pi/2]");
  const double lon = wrap_longitude(p.lon);
  const double c = std::cos(p.lat);
  return {c * std::cos(lon), c * std::sin(lon), std::sin(p.lat)};
}

LonLat direction_to_lonlat(const Direction& d) {
  const double n = d.norm();
  OMNI360_REQUIRE(std::abs(n - 1.0) <= 1e-9, ErrorKind::kDomain,
                  "direction is not unit norm (|d| = " + std::to_string(n) + ")");
  const double rho = std::hypot(d.x, d.y);
  LonLat p;
  p.lat = std::atan2(d.z, rho);
  if (rho == 0.0) {
    p.lon = 0.0;
  } else {
    p.lon = std::atan2(d.y, d.x);
    if (p.lon >= kPi) p.lon = -kPi;
  }
  return p;
}

void validate(const FrameGeometry& g) {
  OMNI360_REQUIRE(g.width > 0 && g.height > 0, ErrorKind::kContract,
                  "frame dimensions must be positive");
  OMNI360_REQUIRE(g.bit_depth == 8 || g.bit_depth == 10, ErrorKind::kContract,
                  "bit depth must be 8 or 10, got " + std::to_string(g.bit_depth));
  if (g.chroma == ChromaFormat::k420) {
    OMNI360_REQUIRE(g.width % 2 == 0 && g.height % 2 == 0, ErrorKind::kContract,
                    "4:2:0 frames need even width and height");
  }
}

UnitCoord pixel_to_unit(int i, int j, const FrameGeometry& g) {
  OMNI360_REQUIRE(i >= 0 && i < g.width && j >= 0 && j < g.height, ErrorKind::kDomain,
                  "pixel (" + std::to_string(i) + ", " + std::to_string(j) +
                      ") outside " + std::to_string(g.width) + "x" +
                      std::to_string(g.height));
  return {(i + 0.5) / g.width, (j + 0.5) / g.height};
}

}  // namespace omni360
