#include <random>

#include "doctest.h"
#include "omni360/sphere.hpp"
#include "support/errors.hpp"
#include "support/synthetic.hpp"

using namespace omni360;

namespace {
void check_dir(const Direction& d, double x, double y, double z) {
  CHECK(std::abs(d.x - x) < 1e-15);
  CHECK(std::abs(d.y - y) < 1e-15);
  CHECK(std::abs(d.z - z) < 1e-15);
}
}  // namespace

TEST_CASE("lonlat_to_direction axis examples") {
  check_dir(lonlat_to_direction({0, 0}), 1, 0, 0);
  check_dir(lonlat_to_direction({kPi / 2, 0}), 0, 1, 0);
  check_dir(lonlat_to_direction({0, kPi / 2}), 0, 0, 1);
  CHECK_THROWS_KIND(lonlat_to_direction({0, kPi / 2 + 1e-9}), ErrorKind::kDomain);
  CHECK_THROWS_KIND(lonlat_to_direction({0, -2.0}), ErrorKind::kDomain);
}

TEST_CASE("direction_to_lonlat examples and pole convention") {
  LonLat p = direction_to_lonlat({0, -1, 0});
  CHECK(p.lon == doctest::Approx(-kPi / 2));
  CHECK(p.lat == doctest::Approx(0));
  p = direction_to_lonlat({0, 0, -1});
  CHECK(p.lon == 0.0);
  CHECK(p.lat == doctest::Approx(-kPi / 2));
  p = direction_to_lonlat({0, 0, 1});
  CHECK(p.lon == 0.0);
  // lon = pi wraps into [-pi, pi)
  p = direction_to_lonlat({-1, 0, 0});
  CHECK(p.lon == doctest::Approx(-kPi));
  CHECK_THROWS_KIND(direction_to_lonlat({2, 0, 0}), ErrorKind::kDomain);
  CHECK_THROWS_KIND(direction_to_lonlat({1 + 1e-8, 0, 0}), ErrorKind::kDomain);
}

TEST_CASE("wrap_longitude lands in [-pi, pi)") {
  CHECK(wrap_longitude(kPi) == doctest::Approx(-kPi));
  CHECK(wrap_longitude(3 * kPi / 2) == doctest::Approx(-kPi / 2));
  CHECK(wrap_longitude(-5 * kPi / 2) == doctest::Approx(-kPi / 2));
  std::mt19937 rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double w = wrap_longitude((testing::unit_random(rng) - 0.5) * 40.0);
    CHECK(w >= -kPi);
    CHECK(w < kPi);
  }
}

TEST_CASE("lonlat round trip over random directions") {
  std::mt19937 rng(11);
  double worst = 0.0, worst_norm = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const Direction d = testing::random_direction(rng);
    const Direction back = lonlat_to_direction(direction_to_lonlat(d));
    worst = std::max(worst, angle_between(d, back));
    worst_norm = std::max(worst_norm, std::abs(back.norm() - 1.0));
  }
  CHECK(worst < 1e-12);
  CHECK(worst_norm < 1e-12);
}

TEST_CASE("normalized and angle_between") {
  const Direction d = normalized(3, 4, 0);
  CHECK(d.x == doctest::Approx(0.6));
  CHECK(std::abs(d.norm() - 1) < 1e-15);
  CHECK_THROWS_KIND(normalized(0, 0, 0), ErrorKind::kDomain);
  CHECK(angle_between({1, 0, 0}, {0, 1, 0}) == doctest::Approx(kPi / 2));
  CHECK(angle_between({1, 0, 0}, {-1, 0, 0}) == doctest::Approx(kPi));
  // tiny angles resolve well below acos precision
  const Direction e = normalized(1, 1e-12, 0);
  CHECK(angle_between({1, 0, 0}, e) == doctest::Approx(1e-12).epsilon(1e-6));
}

TEST_CASE("pixel_to_unit examples") {
  const FrameGeometry g2{2, 2, 8, ChromaFormat::k444};
  CHECK(pixel_to_unit(0, 0, g2).u == 0.25);
  CHECK(pixel_to_unit(0, 0, g2).v == 0.25);
  CHECK(pixel_to_unit(1, 1, g2).u == 0.75);
  CHECK(pixel_to_unit(1, 1, g2).v == 0.75);
  const FrameGeometry g{2048, 1024, 8, ChromaFormat::k420};
  const UnitCoord c = pixel_to_unit(1023, 511, g);
  CHECK(c.u == 1023.5 / 2048);
  CHECK(c.v == 511.5 / 1024);
  CHECK(c.u == doctest::Approx(0.499756).epsilon(1e-6));
  CHECK_THROWS_KIND(pixel_to_unit(2, 0, g2), ErrorKind::kDomain);
  CHECK_THROWS_KIND(pixel_to_unit(0, -1, g2), ErrorKind::kDomain);
}

TEST_CASE("pixel lattice lies strictly inside the unit square") {
  const FrameGeometry g{7, 5, 8, ChromaFormat::k444};
  for (int j = 0; j < g.height; ++j) {
    for (int i = 0; i < g.width; ++i) {
      const UnitCoord c = pixel_to_unit(i, j, g);
      CHECK(c.u > 0);
      CHECK(c.u < 1);
      CHECK(c.v > 0);
      CHECK(c.v < 1);
      CHECK(static_cast<int>(c.u * g.width) == i);
      CHECK(static_cast<int>(c.v * g.height) == j);
    }
  }
}

TEST_CASE("FrameGeometry sizes and validation") {
  const FrameGeometry g{2, 2, 8, ChromaFormat::k420};
  CHECK(g.bytes_per_frame() == 6);
  const FrameGeometry h{2, 2, 10, ChromaFormat::k444};
  CHECK(h.bytes_per_frame() == 24);
  CHECK(h.max_value() == 1023);
  CHECK_THROWS_KIND(validate(FrameGeometry{3, 2, 8, ChromaFormat::k420}), ErrorKind::kContract);
  CHECK_THROWS_KIND(validate(FrameGeometry{4, 2, 12, ChromaFormat::k444}), ErrorKind::kContract);
  CHECK_THROWS_KIND(validate(FrameGeometry{0, 2, 8, ChromaFormat::k444}), ErrorKind::kContract);
  CHECK_NOTHROW(validate(FrameGeometry{3, 3, 8, ChromaFormat::k444}));
}
