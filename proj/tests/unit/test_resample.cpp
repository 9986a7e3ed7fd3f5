#include <random>

#include "doctest.h"
#include "omni360/metrics.hpp"
#include "omni360/resample.hpp"
#include "support/errors.hpp"
#include "support/synthetic.hpp"

using namespace omni360;
using omni360::testing::unit_random;

namespace {

ProjectionSpec spec_at(const std::string& name, int w, int h, int bit_depth = 8) {
  ProjectionSpec s = ProjectionSpec::parse(name);
  s.coded_geometry = {w, h, bit_depth, ChromaFormat::k444};
  return s;
}

ProjectionSpec small_spec(const std::string& name) {
  return name == "erp" || name == "aep" ? spec_at(name, 96, 48) : spec_at(name, 72, 48);
}

Frame constant_frame(const FrameGeometry& g, std::uint16_t y, std::uint16_t u, std::uint16_t v) {
  Frame f(g);
  std::fill(f.y().samples.begin(), f.y().samples.end(), y);
  std::fill(f.u().samples.begin(), f.u().samples.end(), u);
  std::fill(f.v().samples.begin(), f.v().samples.end(), v);
  return f;
}

Frame random_frame(const FrameGeometry& g, std::mt19937& rng) {
  Frame f(g);
  for (Plane& p : f.planes) {
    for (auto& s : p.samples) s = static_cast<std::uint16_t>(rng() % (g.max_value() + 1));
  }
  return f;
}

// Random smooth plane: a few 2-D cosines with periods of at least min_period samples.
void fill_smooth(Plane& p, std::mt19937& rng, double min_period, int max_value) {
  struct Wave {
    double fx, fy, phase, amp;
  };
  std::vector<Wave> waves;
  for (int k = 0; k < 4; ++k) {
    waves.push_back({(2 * unit_random(rng) - 1) / min_period, (2 * unit_random(rng) - 1) / min_period,
                     2 * kPi * unit_random(rng), 0.2 * max_value * unit_random(rng)});
  }
  for (int y = 0; y < p.height; ++y) {
    for (int x = 0; x < p.width; ++x) {
      double v = max_value / 2.0;
      for (const auto& w : waves) v += w.amp * std::cos(2 * kPi * (w.fx * x + w.fy * y) + w.phase);
      p.at(x, y) = static_cast<std::uint16_t>(std::lround(std::clamp(v, 0.0, double(max_value))));
    }
  }
}

}  // namespace

TEST_CASE("kernel_weight examples") {
  CHECK(kernel_weight(Kernel::lanczos(3), 0.0) == 1.0);
  CHECK(std::abs(kernel_weight(Kernel::lanczos(3), 1.0)) < 1e-16);
  CHECK(kernel_weight(Kernel::lanczos(3), 3.0) == 0.0);
  CHECK(kernel_weight(Kernel::bilinear(), 0.25) == 0.75);
  CHECK(kernel_weight(Kernel::bilinear(), -1.5) == 0.0);
  CHECK(kernel_weight(Kernel::nearest(), 0.49) == 1.0);
  CHECK(kernel_weight(Kernel::nearest(), 0.5) == 0.0);
  // sinc(x) sinc(x/a) at x = 0.5, a = 3
  const double x = 0.5;
  const double expect = std::sin(kPi * x) / (kPi * x) * std::sin(kPi * x / 3) / (kPi * x / 3);
  CHECK(kernel_weight(Kernel::lanczos(3), x) == doctest::Approx(expect).epsilon(1e-15));
}

TEST_CASE("kernel names") {
  CHECK(parse_kernel("lanczos3") == Kernel::lanczos(3));
  CHECK(parse_kernel("bilinear") == Kernel::bilinear());
  CHECK(to_string(Kernel::lanczos(2)) == "lanczos2");
  CHECK(chroma_kernel_for(Kernel::lanczos(3)) == Kernel::lanczos(2));
  CHECK(chroma_kernel_for(Kernel::bilinear()) == Kernel::bilinear());
  CHECK_THROWS_KIND(parse_kernel("bicubic"), ErrorKind::kConfig);
  CHECK_THROWS_KIND(parse_kernel("lanczos"), ErrorKind::kConfig);
}

TEST_CASE("constant frames stay constant for every format pair and kernel") {
  const std::vector<std::string> names = {"erp", "aep", "cmp", "eac", "hec", "acp", "gcp", "ecp"};
  for (const Kernel& k : {Kernel::nearest(), Kernel::bilinear(), Kernel::lanczos(3)}) {
    for (const auto& from : names) {
      for (const auto& to : {std::string("erp"), std::string("acp"), std::string("ecp"), std::string("aep")}) {
        CAPTURE(from);
        CAPTURE(to);
        const ProjectionSpec src = small_spec(from), dst = small_spec(to);
        const Frame f = constant_frame(src.coded_geometry, 77, 200, 3);
        const Frame out = resample_frame(f, src, dst, k);
        CHECK(out.geometry.width == dst.coded_geometry.width);
        CHECK(out == constant_frame(out.geometry, 77, 200, 3));
      }
    }
  }
}

TEST_CASE("ERP to ERP at identical geometry with nearest is a copy") {
  std::mt19937 rng(2);
  const ProjectionSpec erp = spec_at("erp", 64, 32, 10);
  const Frame f = random_frame(erp.coded_geometry, rng);
  CHECK(resample_frame(f, erp, erp, Kernel::nearest()) == f);
}

TEST_CASE("resampling is deterministic and independent of thread count") {
  std::mt19937 rng(4);
  const ProjectionSpec erp = spec_at("erp", 128, 64), ecp = spec_at("ecp", 96, 64);
  const Frame f = random_frame(erp.coded_geometry, rng);
  ResampleOptions one;
  one.threads = 1;
  ResampleOptions four;
  four.threads = 4;
  const Resampler a(one), b(four);
  const auto ra = a.resample(std::span(&f, 1), erp, ecp);
  const auto rb = b.resample(std::span(&f, 1), erp, ecp);
  const auto rc = b.resample(std::span(&f, 1), erp, ecp);  // cached map
  CHECK(ra == rb);
  CHECK(rb == rc);
}

TEST_CASE("outputs stay in range with negative-lobe kernels") {
  // Extreme checkerboard at 10 bits rings hard under lanczos.
  const ProjectionSpec erp = spec_at("erp", 64, 32, 10), cmp = spec_at("cmp", 75, 50, 10);
  Frame f(erp.coded_geometry);
  for (Plane& p : f.planes) {
    for (int y = 0; y < p.height; ++y) {
      for (int x = 0; x < p.width; ++x) p.at(x, y) = ((x / 2 + y / 2) % 2) ? 1023 : 0;
    }
  }
  const Frame out = resample_frame(f, erp, cmp, Kernel::lanczos(4));
  CHECK_NOTHROW(validate(out));
  bool hit_max = false, hit_min = false;
  for (auto s : out.y().samples) {
    hit_max = hit_max || s == 1023;
    hit_min = hit_min || s == 0;
  }
  CHECK(hit_max);
  CHECK(hit_min);
}

TEST_CASE("resample rejects mismatched geometry") {
  const ProjectionSpec erp = spec_at("erp", 64, 32), acp = spec_at("acp", 48, 32);
  const Frame wrong(FrameGeometry{32, 16, 8, ChromaFormat::k444});
  const Resampler r;
  CHECK_THROWS_KIND(r.resample(std::span(&wrong, 1), erp, acp), ErrorKind::kContract);
}

TEST_CASE("4:2:0 frames resample with chroma on the 4:2:0 grid") {
  ProjectionSpec erp = spec_at("erp", 64, 32), acp = spec_at("acp", 48, 32);
  Frame f = constant_frame({64, 32, 8, ChromaFormat::k420}, 50, 60, 70);
  const Frame out = resample_frame(f, erp, acp, Kernel::lanczos(3));
  CHECK(out.geometry.chroma == ChromaFormat::k420);
  CHECK(out.u().width == 24);
  CHECK(out == constant_frame(out.geometry, 50, 60, 70));
}

TEST_CASE("horizontal wrap-around on ERP sources") {
  // A bright column at the left edge must show up on the right edge of an
  // ERP -> ERP half-pixel shifted resample only when wrapping is applied.
  const ProjectionSpec src = spec_at("erp", 64, 32), dst = spec_at("erp", 128, 64);
  Frame f = constant_frame(src.coded_geometry, 0, 128, 128);
  for (int y = 0; y < 32; ++y) f.y().at(0, y) = 255;
  const Frame out = resample_frame(f, src, dst, Kernel::bilinear());
  // dst column 127 sits at src x = 63.75, a quarter pixel from the wrapped column 0.
  CHECK(out.y().at(127, 32) == 64);
}

TEST_CASE("chroma conversion contracts") {
  const Frame f444 = constant_frame({4, 4, 8, ChromaFormat::k444}, 10, 20, 30);
  const Frame f420 = chroma_444_to_420(f444);
  CHECK(f420.u().width == 2);
  CHECK(f420.u().height == 2);
  CHECK(f420 == constant_frame(f420.geometry, 10, 20, 30));
  CHECK(chroma_420_to_444(f420) == f444);
  CHECK_THROWS_KIND(chroma_420_to_444(f444), ErrorKind::kContract);
  CHECK_THROWS_KIND(chroma_444_to_420(f420), ErrorKind::kContract);
  const Frame odd(FrameGeometry{5, 4, 8, ChromaFormat::k444});
  CHECK_THROWS_KIND(chroma_444_to_420(odd), ErrorKind::kContract);
}

TEST_CASE("chroma up-then-down round trip on random smooth 4:2:0 frames") {
  std::mt19937 rng(8);
  const FrameGeometry g{64, 32, 8, ChromaFormat::k420};
  double total = 0.0;
  long long count = 0;
  for (int n = 0; n < 1000; ++n) {
    Frame f(g);
    fill_smooth(f.y(), rng, 8.0, 255);
    fill_smooth(f.u(), rng, 16.0, 255);
    fill_smooth(f.v(), rng, 16.0, 255);
    const Frame back = chroma_444_to_420(chroma_420_to_444(f));
    CHECK(back.y() == f.y());
    for (int c = 1; c < 3; ++c) {
      for (std::size_t i = 0; i < f.planes[c].samples.size(); ++i) {
        total += std::abs(int(back.planes[c].samples[i]) - int(f.planes[c].samples[i]));
        ++count;
      }
    }
  }
  const double mae = total / count;
  MESSAGE("chroma round-trip mean abs error: " << mae);
  CHECK(mae < 1.0);
}

TEST_CASE("lanczos-3 round trip beats bilinear on a bandlimited pattern") {
  const FrameGeometry g{512, 256, 8, ChromaFormat::k444};
  const Frame src = testing::synthetic_erp_frame(g, 3, 60.0);
  const ProjectionSpec erp = spec_at("erp", 512, 256), acp = spec_at("acp", 450, 300);
  double ws[2];
  int i = 0;
  for (const Kernel& k : {Kernel::lanczos(3), Kernel::bilinear()}) {
    const Frame coded = resample_frame(src, erp, acp, k);
    const Frame back = resample_frame(coded, acp, erp, k);
    ws[i++] = ws_psnr_plane(src.y(), back.y(), 255);
  }
  MESSAGE("lanczos3 " << ws[0] << " dB, bilinear " << ws[1] << " dB");
  CHECK(ws[0] > ws[1]);
}
