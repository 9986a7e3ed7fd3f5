#include "omni360/frame.hpp"

#include <string>

#include "omni360/error.hpp"

namespace omni360 {

Frame::Frame(const FrameGeometry& g) : geometry(g) {
  validate(g);
  planes[0] = Plane(g.width, g.height);
  const int mid = 1 << (g.bit_depth - 1);
  planes[1] = Plane(g.chroma_width(), g.chroma_height(), static_cast<std::uint16_t>(mid));
  planes[2] = Plane(g.chroma_width(), g.chroma_height(), static_cast<std::uint16_t>(mid));
}

void validate(const Frame& f) {
  validate(f.geometry);
  for (int c = 0; c < 3; ++c) {
    const Plane& p = f.planes[static_cast<std::size_t>(c)];
    const int w = c == 0 ? f.geometry.width : f.geometry.chroma_width();
    const int h = c == 0 ? f.geometry.height : f.geometry.chroma_height();
    OMNI360_REQUIRE(p.width == w && p.height == h &&
                        p.samples.size() == static_cast<std::size_t>(w) * h,
                    ErrorKind::kContract,
                    "plane " + std::to_string(c) + " does not match frame geometry");
    const int max_value = f.geometry.max_value();
    for (std::uint16_t s : p.samples) {
      OMNI360_REQUIRE(s <= max_value, ErrorKind::kData,
                      "sample " + std::to_string(s) + " exceeds " +
                          std::to_string(f.geometry.bit_depth) + "-bit range");
    }
  }
}

}  // namespace omni360
