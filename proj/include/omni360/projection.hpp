#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "omni360/sphere.hpp"

namespace omni360 {

enum class Format { kERP, kAEP, kCMP, kEAC, kHEC, kACP, kGCP, kECP };

const char* to_string(Format f);
std::optional<Format> parse_format(std::string_view name);
bool is_cube_family(Format f);

//------------------------------------------------------------------------------
// Face warping. A warp maps a coded face coordinate s in [-1, 1] to the
// cube-plane coordinate c in [-1, 1]; every family is odd, strictly increasing
// and fixes 0 and +-1.

enum class WarpFamily { kIdentity, kTangent, kPolynomial };

struct WarpFunction {
  WarpFamily family = WarpFamily::kIdentity;
  // Polynomial law sign(s) * (a * s^2 + b * |s|); unused by other families.
  double a = 0.0;
  double b = 1.0;

  static WarpFunction identity() { return {}; }
  static WarpFunction tangent() { return {WarpFamily::kTangent, 0.0, 1.0}; }
  static WarpFunction polynomial(double a, double b) { return {WarpFamily::kPolynomial, a, b}; }
};

inline constexpr double kDefaultPolyA = 0.34;
inline constexpr double kDefaultPolyB = 0.66;

// Throws kContract if the coefficients do not give a strictly increasing odd
// law with f(1) = 1.
void validate(const WarpFunction& w);

// Both throw kDomain when the argument is outside [-1, 1].
double warp_eval(const WarpFunction& w, double s);
double warp_invert(const WarpFunction& w, double c);

//------------------------------------------------------------------------------

enum class Face {
  // cube family, in tie-break order
  kPX, kNX, kPY, kNY, kPZ, kNZ,
  // ECP, in tie-break order
  kE0, kE1, kE2, kE3, kTop, kBottom,
  // ERP / AEP
  kF0,
};

const char* to_string(Face f);

struct FaceCoord {
  Face face = Face::kF0;
  double s = 0.0;  // horizontal, [-1, 1]
  double t = 0.0;  // vertical, [-1, 1], positive towards the face's "up"
};

struct ProjectionSpec {
  Format format = Format::kERP;
  // Polynomial coefficients for the horizontal and vertical face axes. ACP and
  // GCP use both, HEC uses the vertical pair on equatorial faces only.
  double poly_u_a = kDefaultPolyA;
  double poly_u_b = kDefaultPolyB;
  double poly_v_a = kDefaultPolyA;
  double poly_v_b = kDefaultPolyB;
  FrameGeometry coded_geometry;

  // Name plus optional coefficients: {} keeps the defaults, {a, b} sets both
  // axes, {au, bu, av, bv} sets them per axis. Coded geometry defaults to
  // default_coded_geometry(format) with 4:4:4 chroma and 8 bits.
  static ProjectionSpec from_name(std::string_view name,
                                  const std::vector<double>& coeffs = {});

  // "acp", "gcp:0.3,0.7,0.36,0.64", ... parsed the same way as from_name.
  static ProjectionSpec parse(std::string_view text);

  // Stable textual identity including coefficients, used for cache keys.
  std::string key() const;
};

// 2048x1024 for ERP/AEP, 1800x1200 for the cube family and ECP.
FrameGeometry default_coded_geometry(Format f, int bit_depth = 8,
                                     ChromaFormat chroma = ChromaFormat::k444);

// Throws kContract when coefficients or coded geometry violate the format's
// constraints (3x2 square faces for cube family and ECP).
void validate(const ProjectionSpec& spec);

// Horizontal / vertical warp used on a given face.
struct FaceWarps {
  WarpFunction horizontal;
  WarpFunction vertical;
};
FaceWarps face_warps(const ProjectionSpec& spec, Face face);

// Packing between face-local (s, t) and packed unit coordinates. Cube family:
// 3x2 grid, top row NY PX PY, bottom row NZ NX PZ rotated 90 degrees
// clockwise. ECP: top row E0 E1 E2, bottom row E3 TOP BOTTOM. ERP/AEP: one
// face spanning the frame.
UnitCoord packing_place(Format format, const FaceCoord& fc);
FaceCoord packing_locate(Format format, UnitCoord uv);

// Packed unit coordinates in [0, 1)^2 -> sphere direction.
Direction forward_map(const ProjectionSpec& spec, UnitCoord uv);

struct InverseResult {
  FaceCoord face;
  UnitCoord uv;  // clamped into [0, 1)^2
};

// Sphere direction -> owning face and packed unit coordinates. Ties at face
// edges resolve to the first face in tie-break order.
InverseResult inverse_map(const ProjectionSpec& spec, const Direction& d);

}  // namespace omni360
