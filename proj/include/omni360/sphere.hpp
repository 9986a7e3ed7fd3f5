#pragma once

#include <cmath>
#include <numbers>

namespace omni360 {

inline constexpr double kPi = std::numbers::pi;

// Unit vector on the image sphere. Axis convention: +x at (lon 0, lat 0),
// +y at (lon pi/2, lat 0), +z at the north pole.
struct Direction {
  double x = 1.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  double dot(const Direction& o) const { return x * o.x + y * o.y + z * o.z; }
};

// Normalizes (x, y, z); throws kDomain for a zero or non-finite vector.
Direction normalized(double x, double y, double z);

// Angle between two unit vectors, accurate for tiny and near-pi angles.
double angle_between(const Direction& a, const Direction& b);

// lon in [-pi, pi), lat in [-pi/2, pi/2].
struct LonLat {
  double lon = 0.0;
  double lat = 0.0;
};

// Wraps an arbitrary longitude into [-pi, pi).
double wrap_longitude(double lon);

// Throws kDomain when |lat| > pi/2. Longitude is wrapped, never rejected.
Direction lonlat_to_direction(LonLat p);

// Throws kDomain when |d| deviates from 1 by more than 1e-9. Poles map to
// lon = 0.
LonLat direction_to_lonlat(const Direction& d);

enum class ChromaFormat { k420, k444 };

struct FrameGeometry {
  int width = 0;
  int height = 0;
  int bit_depth = 8;
  ChromaFormat chroma = ChromaFormat::k420;

  int max_value() const { return (1 << bit_depth) - 1; }
  int chroma_width() const { return chroma == ChromaFormat::k420 ? width / 2 : width; }
  int chroma_height() const { return chroma == ChromaFormat::k420 ? height / 2 : height; }
  int bytes_per_sample() const { return bit_depth > 8 ? 2 : 1; }
  long long samples_per_frame() const {
    return static_cast<long long>(width) * height +
           2LL * chroma_width() * chroma_height();
  }
  long long bytes_per_frame() const { return samples_per_frame() * bytes_per_sample(); }

  bool operator==(const FrameGeometry&) const = default;
};

// Throws kContract on bad dimensions, unsupported bit depth, or odd sizes
// with 4:2:0.
void validate(const FrameGeometry& g);

struct UnitCoord {
  double u = 0.0;
  double v = 0.0;
};

// Pixel-center convention: u = (i + 0.5) / width, v = (j + 0.5) / height.
UnitCoord pixel_to_unit(int i, int j, const FrameGeometry& g);

}  // namespace omni360
