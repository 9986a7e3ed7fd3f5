#include "omni360/projection.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <string>

#include "omni360/error.hpp"

namespace omni360 {
namespace {

// ECP equatorial band: |sin(lat)| <= 2/3 holds two thirds of the sphere area,
// matching the four equatorial tiles' share of the packed frame.
constexpr double kEcpSinBand = 2.0 / 3.0;
constexpr double kOneMinus = 1.0 - 0x1p-53;

struct Vec3 {
  double x, y, z;
};

struct CubeFaceFrame {
  Vec3 axis;
  Vec3 right;  // direction of increasing s
  Vec3 up;     // direction of increasing t
};

// Frames are chosen so the packed rows NY|PX|PY and NZ|NX|PZ (the latter
// rotated) are continuous across tile borders.
constexpr std::array<CubeFaceFrame, 6> kCubeFrames = {{
    {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}},     // PX
    {{-1, 0, 0}, {0, -1, 0}, {0, 0, 1}},   // NX
    {{0, 1, 0}, {-1, 0, 0}, {0, 0, 1}},    // PY
    {{0, -1, 0}, {1, 0, 0}, {0, 0, 1}},    // NY
    {{0, 0, 1}, {0, -1, 0}, {1, 0, 0}},    // PZ
    {{0, 0, -1}, {0, -1, 0}, {-1, 0, 0}},  // NZ
}};

struct Tile {
  Face face;
  int col;
  int row;
  bool rotated;  // 90 degrees clockwise
};

constexpr std::array<Tile, 6> kCubeTiles = {{
    {Face::kNY, 0, 0, false},
    {Face::kPX, 1, 0, false},
    {Face::kPY, 2, 0, false},
    {Face::kNZ, 0, 1, true},
    {Face::kNX, 1, 1, true},
    {Face::kPZ, 2, 1, true},
}};

constexpr std::array<Tile, 6> kEcpTiles = {{
    {Face::kE0, 0, 0, false},
    {Face::kE1, 1, 0, false},
    {Face::kE2, 2, 0, false},
    {Face::kE3, 0, 1, false},
    {Face::kTop, 1, 1, false},
    {Face::kBottom, 2, 1, false},
}};

double dot(const Vec3& a, const Direction& d) { return a.x * d.x + a.y * d.y + a.z * d.z; }

int cube_index(Face f) { return static_cast<int>(f) - static_cast<int>(Face::kPX); }
int ecp_index(Face f) { return static_cast<int>(f) - static_cast<int>(Face::kE0); }

bool face_valid_for(Format format, Face face) {
  if (format == Format::kERP || format == Format::kAEP) return face == Face::kF0;
  if (format == Format::kECP) return face >= Face::kE0 && face <= Face::kBottom;
  return face >= Face::kPX && face <= Face::kNZ;
}

const Tile& tile_for(Format format, Face face) {
  const auto& tiles = format == Format::kECP ? kEcpTiles : kCubeTiles;
  for (const auto& t : tiles) {
    if (t.face == face) return t;
  }
  raise(ErrorKind::kDomain, "face not packed by format");
}

const Tile& tile_at(Format format, int col, int row) {
  const auto& tiles = format == Format::kECP ? kEcpTiles : kCubeTiles;
  return tiles[static_cast<std::size_t>(row * 3 + col)];
}

void check_unit_square(UnitCoord uv) {
  OMNI360_REQUIRE(uv.u >= 0.0 && uv.u < 1.0 && uv.v >= 0.0 && uv.v < 1.0,
                  ErrorKind::kDomain, "packed coordinate outside [0,1)^2");
}

double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

// Concentric (Shirley-Chiu) square <-> disc; radius equals max(|a|, |b|).
void square_to_disc(double a, double b, double& x, double& y) {
  if (a == 0.0 && b == 0.0) {
    x = y = 0.0;
    return;
  }
  double r, phi;
  if (std::abs(a) > std::abs(b)) {
    r = a;
    phi = (kPi / 4) * (b / a);
  } else {
    r = b;
    phi = kPi / 2 - (kPi / 4) * (a / b);
  }
  x = r * std::cos(phi);
  y = r * std::sin(phi);
}

void disc_to_square(double x, double y, double& a, double& b) {
  const double r = std::hypot(x, y);
  if (r == 0.0) {
    a = b = 0.0;
    return;
  }
  double phi = std::atan2(y, x);
  if (phi < -kPi / 4) phi += 2 * kPi;
  if (phi < kPi / 4) {
    a = r;
    b = phi * a / (kPi / 4);
  } else if (phi < 3 * kPi / 4) {
    b = r;
    a = -(phi - kPi / 2) * b / (kPi / 4);
  } else if (phi < 5 * kPi / 4) {
    a = -r;
    b = (phi - kPi) * a / (kPi / 4);
  } else {
    b = -r;
    a = -(phi - 3 * kPi / 2) * b / (kPi / 4);
  }
  a = clamp_unit(a);
  b = clamp_unit(b);
}

std::string format_coeff(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

const char* to_string(Format f) {
  switch (f) {
    case Format::kERP: return "erp";
    case Format::kAEP: return "aep";
    case Format::kCMP: return "cmp";
    case Format::kEAC: return "eac";
    case Format::kHEC: return "hec";
    case Format::kACP: return "acp";
    case Format::kGCP: return "gcp";
    case Format::kECP: return "ecp";
  }
  return "?";
}

std::optional<Format> parse_format(std::string_view name) {
  for (Format f : {Format::kERP, Format::kAEP, Format::kCMP, Format::kEAC, Format::kHEC,
                   Format::kACP, Format::kGCP, Format::kECP}) {
    if (name == to_string(f)) return f;
  }
  return std::nullopt;
}

bool is_cube_family(Format f) {
  return f == Format::kCMP || f == Format::kEAC || f == Format::kHEC ||
         f == Format::kACP || f == Format::kGCP;
}

const char* to_string(Face f) {
  static constexpr const char* kNames[] = {"PX", "NX", "PY", "NY", "PZ", "NZ", "E0",
                                           "E1", "E2", "E3", "TOP", "BOTTOM", "F0"};
  return kNames[static_cast<int>(f)];
}

//------------------------------------------------------------------------------

void validate(const WarpFunction& w) {
  if (w.family != WarpFamily::kPolynomial) return;
  OMNI360_REQUIRE(std::isfinite(w.a) && std::isfinite(w.b), ErrorKind::kContract,
                  "non-finite warp coefficients");
  OMNI360_REQUIRE(std::abs(w.a + w.b - 1.0) <= 1e-12, ErrorKind::kContract,
                  "polynomial warp needs a + b = 1 (got " + format_coeff(w.a) + ", " +
                      format_coeff(w.b) + ")");
  // f'(s) = 2 a s + b on [0, 1] must stay positive.
  OMNI360_REQUIRE(w.b >= 0.0 && 2.0 * w.a + w.b > 0.0, ErrorKind::kContract,
                  "polynomial warp coefficients are not monotone on [-1, 1]");
}

double warp_eval(const WarpFunction& w, double s) {
  OMNI360_REQUIRE(std::abs(s) <= 1.0, ErrorKind::kDomain, "warp argument outside [-1, 1]");
  switch (w.family) {
    case WarpFamily::kIdentity:
      return s;
    case WarpFamily::kTangent:
      if (std::abs(s) == 1.0) return s;
      return std::tan(s * kPi / 4);
    case WarpFamily::kPolynomial: {
      const double m = std::abs(s);
      return std::copysign(w.a * m * m + w.b * m, s);
    }
  }
  return s;
}

double warp_invert(const WarpFunction& w, double c) {
  OMNI360_REQUIRE(std::abs(c) <= 1.0, ErrorKind::kDomain, "warp argument outside [-1, 1]");
  switch (w.family) {
    case WarpFamily::kIdentity:
      return c;
    case WarpFamily::kTangent:
      if (std::abs(c) == 1.0) return c;
      return std::atan(c) * 4.0 / kPi;
    case WarpFamily::kPolynomial: {
      // Positive root of a m^2 + b m - |c| = 0 in the cancellation-free form.
      const double m = std::abs(c);
      const double root = 2.0 * m / (w.b + std::sqrt(w.b * w.b + 4.0 * w.a * m));
      return std::copysign(std::min(root, 1.0), c);
    }
  }
  return c;
}

//------------------------------------------------------------------------------

FrameGeometry default_coded_geometry(Format f, int bit_depth, ChromaFormat chroma) {
  FrameGeometry g;
  if (f == Format::kERP || f == Format::kAEP) {
    g.width = 2048;
    g.height = 1024;
  } else {
    g.width = 1800;
    g.height = 1200;
  }
  g.bit_depth = bit_depth;
  g.chroma = chroma;
  return g;
}

ProjectionSpec ProjectionSpec::from_name(std::string_view name,
                                         const std::vector<double>& coeffs) {
  const auto format = parse_format(name);
  OMNI360_REQUIRE(format.has_value(), ErrorKind::kConfig,
                  "unknown projection format '" + std::string(name) + "'");
  ProjectionSpec spec;
  spec.format = *format;
  spec.coded_geometry = default_coded_geometry(*format);
  if (!coeffs.empty()) {
    const bool takes_coeffs = spec.format == Format::kACP || spec.format == Format::kGCP ||
                              spec.format == Format::kHEC;
    OMNI360_REQUIRE(takes_coeffs, ErrorKind::kConfig,
                    std::string("format '") + to_string(spec.format) +
                        "' has no warp coefficients");
    if (coeffs.size() == 2) {
      spec.poly_u_a = spec.poly_v_a = coeffs[0];
      spec.poly_u_b = spec.poly_v_b = coeffs[1];
    } else if (coeffs.size() == 4) {
      spec.poly_u_a = coeffs[0];
      spec.poly_u_b = coeffs[1];
      spec.poly_v_a = coeffs[2];
      spec.poly_v_b = coeffs[3];
    } else {
      raise(ErrorKind::kConfig, "warp coefficients come in pairs: give 2 or 4 values");
    }
  }
  try {
    validate(spec);
  } catch (const Error& e) {
    raise(ErrorKind::kConfig, e.what());
  }
  return spec;
}

ProjectionSpec ProjectionSpec::parse(std::string_view text) {
  const auto colon = text.find(':');
  std::vector<double> coeffs;
  if (colon != std::string_view::npos) {
    std::string_view rest = text.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string item(rest.substr(0, comma));
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(item, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      OMNI360_REQUIRE(used == item.size() && !item.empty(), ErrorKind::kConfig,
                      "bad warp coefficient '" + item + "'");
      coeffs.push_back(v);
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
  }
  return from_name(text.substr(0, colon), coeffs);
}

std::string ProjectionSpec::key() const {
  std::string k = to_string(format);
  if (format == Format::kACP || format == Format::kGCP || format == Format::kHEC) {
    k += ":" + format_coeff(poly_u_a) + "," + format_coeff(poly_u_b) + "," +
         format_coeff(poly_v_a) + "," + format_coeff(poly_v_b);
  }
  k += "@" + std::to_string(coded_geometry.width) + "x" + std::to_string(coded_geometry.height);
  k += "/" + std::to_string(coded_geometry.bit_depth);
  k += coded_geometry.chroma == ChromaFormat::k420 ? "/420" : "/444";
  return k;
}

void validate(const ProjectionSpec& spec) {
  validate(WarpFunction::polynomial(spec.poly_u_a, spec.poly_u_b));
  validate(WarpFunction::polynomial(spec.poly_v_a, spec.poly_v_b));
  const FrameGeometry& g = spec.coded_geometry;
  validate(g);
  if (spec.format != Format::kERP && spec.format != Format::kAEP) {
    OMNI360_REQUIRE(g.width % 3 == 0 && g.height % 2 == 0 && g.width / 3 == g.height / 2,
                    ErrorKind::kContract,
                    std::string(to_string(spec.format)) +
                        " needs a 3x2 grid of square faces, got " +
                        std::to_string(g.width) + "x" + std::to_string(g.height));
  }
}

FaceWarps face_warps(const ProjectionSpec& spec, Face face) {
  const auto poly_u = WarpFunction::polynomial(spec.poly_u_a, spec.poly_u_b);
  const auto poly_v = WarpFunction::polynomial(spec.poly_v_a, spec.poly_v_b);
  switch (spec.format) {
    case Format::kCMP:
      return {WarpFunction::identity(), WarpFunction::identity()};
    case Format::kEAC:
      return {WarpFunction::tangent(), WarpFunction::tangent()};
    case Format::kACP:
    case Format::kGCP:
      return {poly_u, poly_v};
    case Format::kHEC: {
      const bool pole = face == Face::kPZ || face == Face::kNZ;
      return {WarpFunction::tangent(), pole ? WarpFunction::tangent() : poly_v};
    }
    default:
      return {WarpFunction::identity(), WarpFunction::identity()};
  }
}

//------------------------------------------------------------------------------

UnitCoord packing_place(Format format, const FaceCoord& fc) {
  OMNI360_REQUIRE(face_valid_for(format, fc.face), ErrorKind::kDomain,
                  std::string("face ") + to_string(fc.face) + " is not part of format " +
                      to_string(format));
  OMNI360_REQUIRE(std::abs(fc.s) <= 1.0 && std::abs(fc.t) <= 1.0, ErrorKind::kDomain,
                  "face coordinate outside [-1, 1]^2");
  if (format == Format::kERP || format == Format::kAEP) {
    return {(fc.s + 1.0) / 2.0, (1.0 - fc.t) / 2.0};
  }
  const Tile& tile = tile_for(format, fc.face);
  // (p, q): tile-local, p to the right, q downwards.
  const double p = tile.rotated ? fc.t : fc.s;
  const double q = tile.rotated ? fc.s : -fc.t;
  return {(tile.col + (p + 1.0) / 2.0) / 3.0, (tile.row + (q + 1.0) / 2.0) / 2.0};
}

FaceCoord packing_locate(Format format, UnitCoord uv) {
  check_unit_square(uv);
  if (format == Format::kERP || format == Format::kAEP) {
    return {Face::kF0, 2.0 * uv.u - 1.0, 1.0 - 2.0 * uv.v};
  }
  const int col = std::min(static_cast<int>(uv.u * 3.0), 2);
  const int row = std::min(static_cast<int>(uv.v * 2.0), 1);
  const Tile& tile = tile_at(format, col, row);
  const double p = clamp_unit(2.0 * (uv.u * 3.0 - col) - 1.0);
  const double q = clamp_unit(2.0 * (uv.v * 2.0 - row) - 1.0);
  if (tile.rotated) return {tile.face, q, p};
  return {tile.face, p, -q};
}

//------------------------------------------------------------------------------

Direction forward_map(const ProjectionSpec& spec, UnitCoord uv) {
  check_unit_square(uv);
  switch (spec.format) {
    case Format::kERP:
      return lonlat_to_direction({(uv.u - 0.5) * 2.0 * kPi, (0.5 - uv.v) * kPi});
    case Format::kAEP:
      return lonlat_to_direction({(uv.u - 0.5) * 2.0 * kPi, std::asin(1.0 - 2.0 * uv.v)});
    case Format::kECP: {
      const FaceCoord fc = packing_locate(spec.format, uv);
      if (fc.face == Face::kTop || fc.face == Face::kBottom) {
        double x, y;
        square_to_disc(fc.s, fc.t, x, y);
        const double r2 = x * x + y * y;
        const double sin_lat = 1.0 - r2 * (1.0 - kEcpSinBand);
        const double cos_lat = std::sqrt(r2 * (1.0 - kEcpSinBand) * (1.0 + sin_lat));
        const double sign = fc.face == Face::kTop ? 1.0 : -1.0;
        if (r2 == 0.0) return {0.0, 0.0, sign};
        const double r = std::sqrt(r2);
        return normalized(cos_lat * x / r, cos_lat * y / r, sign * sin_lat);
      }
      const int k = ecp_index(fc.face);
      const double lon = -kPi + kPi / 4 + k * (kPi / 2) + fc.s * (kPi / 4);
      const double sin_lat = fc.t * kEcpSinBand;
      const double cos_lat = std::sqrt((1.0 - sin_lat) * (1.0 + sin_lat));
      return {cos_lat * std::cos(lon), cos_lat * std::sin(lon), sin_lat};
    }
    default: {
      const FaceCoord fc = packing_locate(spec.format, uv);
      const FaceWarps w = face_warps(spec, fc.face);
      const double sc = warp_eval(w.horizontal, fc.s);
      const double tc = warp_eval(w.vertical, fc.t);
      const CubeFaceFrame& f = kCubeFrames[static_cast<std::size_t>(cube_index(fc.face))];
      return normalized(f.axis.x + sc * f.right.x + tc * f.up.x,
                        f.axis.y + sc * f.right.y + tc * f.up.y,
                        f.axis.z + sc * f.right.z + tc * f.up.z);
    }
  }
}

InverseResult inverse_map(const ProjectionSpec& spec, const Direction& d) {
  const double n = d.norm();
  OMNI360_REQUIRE(std::abs(n - 1.0) <= 1e-9, ErrorKind::kDomain,
                  "inverse_map needs a unit direction");
  InverseResult out;
  switch (spec.format) {
    case Format::kERP:
    case Format::kAEP: {
      const LonLat ll = direction_to_lonlat(d);
      out.uv.u = ll.lon / (2.0 * kPi) + 0.5;
      out.uv.v = spec.format == Format::kERP ? 0.5 - ll.lat / kPi : (1.0 - d.z) / 2.0;
      out.uv.u = std::clamp(out.uv.u, 0.0, kOneMinus);
      out.uv.v = std::clamp(out.uv.v, 0.0, kOneMinus);
      out.face = {Face::kF0, 2.0 * out.uv.u - 1.0, 1.0 - 2.0 * out.uv.v};
      return out;
    }
    case Format::kECP: {
      const double az = std::abs(d.z);
      if (az <= kEcpSinBand) {
        const double lon = direction_to_lonlat(d).lon;
        const double pos = (lon + kPi) / (kPi / 2);
        int k = static_cast<int>(std::floor(pos));
        if (k > 0 && static_cast<double>(k) == pos) --k;  // edge -> lower tile
        k = std::clamp(k, 0, 3);
        const double center = -kPi + kPi / 4 + k * (kPi / 2);
        out.face.face = static_cast<Face>(static_cast<int>(Face::kE0) + k);
        out.face.s = clamp_unit((lon - center) / (kPi / 4));
        out.face.t = clamp_unit(d.z / kEcpSinBand);
      } else {
        out.face.face = d.z > 0 ? Face::kTop : Face::kBottom;
        const double rho2 = d.x * d.x + d.y * d.y;
        // r^2 = (1 - |z|) / (1 - sin band), written without cancellation.
        const double r = std::min(std::sqrt(rho2 / ((1.0 + az) * (1.0 - kEcpSinBand))), 1.0);
        const double rho = std::sqrt(rho2);
        double x = 0.0, y = 0.0;
        if (rho > 0.0) {
          x = r * d.x / rho;
          y = r * d.y / rho;
        }
        disc_to_square(x, y, out.face.s, out.face.t);
      }
      break;
    }
    default: {
      const double ax = std::abs(d.x), ay = std::abs(d.y), az = std::abs(d.z);
      Face face;
      if (ax >= ay && ax >= az) {
        face = d.x > 0 ? Face::kPX : Face::kNX;
      } else if (ay >= az) {
        face = d.y > 0 ? Face::kPY : Face::kNY;
      } else {
        face = d.z > 0 ? Face::kPZ : Face::kNZ;
      }
      const CubeFaceFrame& f = kCubeFrames[static_cast<std::size_t>(cube_index(face))];
      const double depth = dot(f.axis, d);
      const double sc = clamp_unit(dot(f.right, d) / depth);
      const double tc = clamp_unit(dot(f.up, d) / depth);
      const FaceWarps w = face_warps(spec, face);
      out.face = {face, warp_invert(w.horizontal, sc), warp_invert(w.vertical, tc)};
      break;
    }
  }
  out.uv = packing_place(spec.format, out.face);
  out.uv.u = std::clamp(out.uv.u, 0.0, kOneMinus);
  out.uv.v = std::clamp(out.uv.v, 0.0, kOneMinus);
  return out;
}

}  // namespace omni360
