#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "omni360/sphere.hpp"

namespace omni360 {

struct Plane {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> samples;  // row-major

  Plane() = default;
  Plane(int w, int h, std::uint16_t fill = 0)
      : width(w), height(h), samples(static_cast<std::size_t>(w) * h, fill) {}

  std::uint16_t& at(int x, int y) { return samples[static_cast<std::size_t>(y) * width + x]; }
  std::uint16_t at(int x, int y) const { return samples[static_cast<std::size_t>(y) * width + x]; }

  bool operator==(const Plane&) const = default;
};

// Planar picture; planes are Y, U, V (or R, G, B for RgbFrame).
struct Frame {
  FrameGeometry geometry;
  std::array<Plane, 3> planes;

  Frame() = default;
  explicit Frame(const FrameGeometry& g);

  Plane& y() { return planes[0]; }
  Plane& u() { return planes[1]; }
  Plane& v() { return planes[2]; }
  const Plane& y() const { return planes[0]; }
  const Plane& u() const { return planes[1]; }
  const Plane& v() const { return planes[2]; }

  bool operator==(const Frame&) const = default;
};

// Frame whose planes match geometry and whose samples fit in bit_depth.
void validate(const Frame& f);

// Full-range RGB, 4:4:4, planes R, G, B.
struct RgbFrame {
  int width = 0;
  int height = 0;
  int bit_depth = 8;
  std::array<Plane, 3> planes;

  bool operator==(const RgbFrame&) const = default;
};

}  // namespace omni360
