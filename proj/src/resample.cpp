#include "omni360/resample.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <thread>

#include "omni360/error.hpp"

namespace omni360 {
namespace {

constexpr int kMaxTaps = 8;

struct Siting {
  // Plane sample (i, j) sits at luma pixel (scale * i + offset_x, scale * j + offset_y).
  double scale = 1.0;
  double offset_x = 0.0;
  double offset_y = 0.0;
};

constexpr Siting kLumaSiting{1.0, 0.0, 0.0};
constexpr Siting kChroma420Siting{2.0, 0.0, 0.5};

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = kPi * x;
  return std::sin(px) / px;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

template <typename Fn>
void parallel_rows(int rows, int threads, Fn&& fn) {
  threads = std::clamp(threads, 1, std::max(rows, 1));
  if (threads == 1) {
    fn(0, rows);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    const int begin = rows * t / threads;
    const int end = rows * (t + 1) / threads;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
}

struct AxisTaps {
  int count = 0;
  std::array<int, 2 * kMaxTaps> index{};
  std::array<double, 2 * kMaxTaps> weight{};
};

int wrap_index(int i, int size) {
  i %= size;
  return i < 0 ? i + size : i;
}

void compute_taps(const Kernel& k, double pos, int size, bool wrap, AxisTaps& out) {
  auto place = [&](int i) { return wrap ? wrap_index(i, size) : std::clamp(i, 0, size - 1); };
  if (k.family == KernelFamily::kNearest) {
    out.count = 1;
    out.index[0] = place(static_cast<int>(std::floor(pos + 0.5)));
    out.weight[0] = 1.0;
    return;
  }
  const int base = static_cast<int>(std::floor(pos));
  const int half = k.family == KernelFamily::kBilinear ? 1 : k.taps;
  out.count = 2 * half;
  double sum = 0.0;
  for (int n = 0; n < out.count; ++n) {
    const int i = base - half + 1 + n;
    const double w = kernel_weight(k, pos - i);
    out.index[static_cast<std::size_t>(n)] = place(i);
    out.weight[static_cast<std::size_t>(n)] = w;
    sum += w;
  }
  for (int n = 0; n < out.count; ++n) out.weight[static_cast<std::size_t>(n)] /= sum;
}

double apply_taps(const Plane& p, const AxisTaps& tx, const AxisTaps& ty) {
  double acc = 0.0;
  for (int b = 0; b < ty.count; ++b) {
    const std::uint16_t* row =
        p.samples.data() + static_cast<std::size_t>(ty.index[static_cast<std::size_t>(b)]) * p.width;
    double line = 0.0;
    for (int a = 0; a < tx.count; ++a) {
      line += tx.weight[static_cast<std::size_t>(a)] * row[tx.index[static_cast<std::size_t>(a)]];
    }
    acc += ty.weight[static_cast<std::size_t>(b)] * line;
  }
  return acc;
}

std::uint16_t quantize(double v, int max_value) {
  const double r = std::floor(v + 0.5);
  return static_cast<std::uint16_t>(std::clamp(r, 0.0, static_cast<double>(max_value)));
}

bool wraps_horizontally(Format f) { return f == Format::kERP || f == Format::kAEP; }

}  // namespace

//------------------------------------------------------------------------------

const char* to_string(KernelFamily f) {
  switch (f) {
    case KernelFamily::kNearest: return "nearest";
    case KernelFamily::kBilinear: return "bilinear";
    case KernelFamily::kLanczos: return "lanczos";
  }
  return "?";
}

std::string to_string(const Kernel& k) {
  if (k.family == KernelFamily::kLanczos) return "lanczos" + std::to_string(k.taps);
  return to_string(k.family);
}

Kernel parse_kernel(const std::string& name) {
  if (name == "nearest") return Kernel::nearest();
  if (name == "bilinear") return Kernel::bilinear();
  if (name.rfind("lanczos", 0) == 0) {
    const std::string digits = name.substr(7);
    if (digits.size() == 1 && digits[0] >= '1' && digits[0] <= '0' + kMaxTaps) {
      return Kernel::lanczos(digits[0] - '0');
    }
  }
  raise(ErrorKind::kConfig, "unknown kernel '" + name + "'");
}

double kernel_weight(const Kernel& k, double x) {
  const double ax = std::abs(x);
  switch (k.family) {
    case KernelFamily::kNearest:
      return ax < 0.5 ? 1.0 : 0.0;
    case KernelFamily::kBilinear:
      return std::max(0.0, 1.0 - ax);
    case KernelFamily::kLanczos:
      if (ax >= k.taps) return 0.0;
      return sinc(x) * sinc(x / k.taps);
  }
  return 0.0;
}

Kernel chroma_kernel_for(const Kernel& luma) {
  if (luma.family == KernelFamily::kLanczos) return Kernel::lanczos(std::min(luma.taps, 2));
  return luma;
}

//------------------------------------------------------------------------------

struct Resampler::CoordinateMap {
  int width = 0;   // destination plane
  int height = 0;
  int src_width = 0;
  int src_height = 0;
  bool wrap_x = false;
  std::vector<double> x;  // continuous source plane positions
  std::vector<double> y;
};

Resampler::Resampler(ResampleOptions options) : options_(options) {
  for (const Kernel* k : {&options_.luma, &options_.chroma}) {
    OMNI360_REQUIRE(k->taps >= 1 && k->taps <= kMaxTaps, ErrorKind::kContract,
                    "kernel taps must be in [1, 8]");
  }
}

Resampler::~Resampler() = default;

std::shared_ptr<const Resampler::CoordinateMap> Resampler::coordinate_map(
    const ProjectionSpec& src_spec, const ProjectionSpec& dst_spec, bool chroma420) const {
  const std::string key = src_spec.key() + "|" + dst_spec.key() + (chroma420 ? "|c420" : "|l");
  std::lock_guard lock(cache_mutex_);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;

  const Siting& siting = chroma420 ? kChroma420Siting : kLumaSiting;
  const int dst_w = dst_spec.coded_geometry.width;
  const int dst_h = dst_spec.coded_geometry.height;
  const int src_w = src_spec.coded_geometry.width;
  const int src_h = src_spec.coded_geometry.height;

  auto map = std::make_shared<CoordinateMap>();
  map->width = chroma420 ? dst_w / 2 : dst_w;
  map->height = chroma420 ? dst_h / 2 : dst_h;
  map->src_width = chroma420 ? src_w / 2 : src_w;
  map->src_height = chroma420 ? src_h / 2 : src_h;
  map->wrap_x = wraps_horizontally(src_spec.format);
  const std::size_t n = static_cast<std::size_t>(map->width) * map->height;
  map->x.resize(n);
  map->y.resize(n);

  parallel_rows(map->height, resolve_threads(options_.threads), [&](int begin, int end) {
    for (int j = begin; j < end; ++j) {
      for (int i = 0; i < map->width; ++i) {
        const double lx = siting.scale * i + siting.offset_x;
        const double ly = siting.scale * j + siting.offset_y;
        const UnitCoord uv{(lx + 0.5) / dst_w, (ly + 0.5) / dst_h};
        const InverseResult inv = inverse_map(src_spec, forward_map(dst_spec, uv));
        const double sx = inv.uv.u * src_w - 0.5;
        const double sy = inv.uv.v * src_h - 0.5;
        const std::size_t k = static_cast<std::size_t>(j) * map->width + i;
        map->x[k] = (sx - siting.offset_x) / siting.scale;
        map->y[k] = (sy - siting.offset_y) / siting.scale;
      }
    }
  });
  cache_.emplace(key, map);
  return map;
}

std::vector<Frame> Resampler::resample(std::span<const Frame> src, const ProjectionSpec& src_spec,
                                       const ProjectionSpec& dst_spec) const {
  validate(src_spec);
  validate(dst_spec);
  std::vector<Frame> out;
  if (src.empty()) return out;

  const FrameGeometry& sg = src.front().geometry;
  for (const Frame& f : src) {
    OMNI360_REQUIRE(f.geometry == sg, ErrorKind::kContract, "frames differ in geometry");
    OMNI360_REQUIRE(f.planes[0].width == sg.width && f.planes[0].height == sg.height,
                    ErrorKind::kContract, "luma plane does not match frame geometry");
  }
  OMNI360_REQUIRE(sg.width == src_spec.coded_geometry.width &&
                      sg.height == src_spec.coded_geometry.height,
                  ErrorKind::kContract,
                  "source frame " + std::to_string(sg.width) + "x" + std::to_string(sg.height) +
                      " does not match " + src_spec.key());

  FrameGeometry dg = dst_spec.coded_geometry;
  dg.bit_depth = sg.bit_depth;
  dg.chroma = sg.chroma;
  validate(dg);
  out.reserve(src.size());
  for (std::size_t f = 0; f < src.size(); ++f) out.emplace_back(dg);

  const bool is420 = sg.chroma == ChromaFormat::k420;
  const auto luma_map = coordinate_map(src_spec, dst_spec, false);
  const auto chroma_map = is420 ? coordinate_map(src_spec, dst_spec, true) : luma_map;
  const int max_value = sg.max_value();
  const int threads = resolve_threads(options_.threads);

  struct Pass {
    const CoordinateMap* map;
    const Kernel* kernel;
    int first_plane;
    int plane_count;
  };
  std::vector<Pass> passes;
  if (!is420 && options_.luma == options_.chroma) {
    passes.push_back({luma_map.get(), &options_.luma, 0, 3});
  } else {
    passes.push_back({luma_map.get(), &options_.luma, 0, 1});
    passes.push_back({chroma_map.get(), &options_.chroma, 1, 2});
  }

  for (const Pass& pass : passes) {
    const CoordinateMap& m = *pass.map;
    parallel_rows(m.height, threads, [&](int begin, int end) {
      AxisTaps tx, ty;
      for (int j = begin; j < end; ++j) {
        for (int i = 0; i < m.width; ++i) {
          const std::size_t k = static_cast<std::size_t>(j) * m.width + i;
          compute_taps(*pass.kernel, m.x[k], m.src_width, m.wrap_x, tx);
          compute_taps(*pass.kernel, m.y[k], m.src_height, false, ty);
          for (std::size_t f = 0; f < src.size(); ++f) {
            for (int c = pass.first_plane; c < pass.first_plane + pass.plane_count; ++c) {
              const auto pc = static_cast<std::size_t>(c);
              out[f].planes[pc].samples[k] =
                  quantize(apply_taps(src[f].planes[pc], tx, ty), max_value);
            }
          }
        }
      }
    });
  }
  return out;
}

Frame resample_frame(const Frame& src, const ProjectionSpec& src_spec,
                     const ProjectionSpec& dst_spec, const Kernel& kernel) {
  ResampleOptions opts;
  opts.luma = kernel;
  opts.chroma = chroma_kernel_for(kernel);
  Resampler r(opts);
  return std::move(r.resample(std::span(&src, 1), src_spec, dst_spec).front());
}

//------------------------------------------------------------------------------

Frame chroma_420_to_444(const Frame& f) {
  OMNI360_REQUIRE(f.geometry.chroma == ChromaFormat::k420, ErrorKind::kContract,
                  "chroma_420_to_444 needs a 4:2:0 frame");
  validate(f);
  FrameGeometry g = f.geometry;
  g.chroma = ChromaFormat::k444;
  Frame out(g);
  out.planes[0] = f.planes[0];
  const int cw = f.geometry.chroma_width();
  const int ch = f.geometry.chroma_height();
  for (int c = 1; c < 3; ++c) {
    const Plane& in = f.planes[static_cast<std::size_t>(c)];
    Plane& dst = out.planes[static_cast<std::size_t>(c)];
    for (int y = 0; y < g.height; ++y) {
      // Chroma row m sits at luma row 2m + 0.5: weights 1:3 / 3:1 (x4).
      const int m = y / 2;
      const int r0 = (y % 2 == 0) ? std::max(m - 1, 0) : m;
      const int r1 = (y % 2 == 0) ? m : std::min(m + 1, ch - 1);
      const int w0 = (y % 2 == 0) ? 1 : 3;
      const int w1 = 4 - w0;
      for (int x = 0; x < g.width; ++x) {
        // Chroma column n sits at luma column 2n: weights 2 or 1:1 (x2).
        const int n = x / 2;
        const int c0 = n;
        const int c1 = (x % 2 == 0) ? n : std::min(n + 1, cw - 1);
        const int acc = w0 * (in.at(c0, r0) + in.at(c1, r0)) + w1 * (in.at(c0, r1) + in.at(c1, r1));
        dst.at(x, y) = static_cast<std::uint16_t>((acc + 4) / 8);
      }
    }
  }
  return out;
}

Frame chroma_444_to_420(const Frame& f) {
  OMNI360_REQUIRE(f.geometry.chroma == ChromaFormat::k444, ErrorKind::kContract,
                  "chroma_444_to_420 needs a 4:4:4 frame");
  validate(f);
  FrameGeometry g = f.geometry;
  g.chroma = ChromaFormat::k420;
  validate(g);
  Frame out(g);
  out.planes[0] = f.planes[0];
  const int w = g.width, h = g.height;
  // (1,2,1)/4 horizontally at even columns; vertically the same filter
  // sampled half-way between rows, i.e. (1,3,3,1)/8.
  constexpr int kV[4] = {1, 3, 3, 1};
  for (int c = 1; c < 3; ++c) {
    const Plane& in = f.planes[static_cast<std::size_t>(c)];
    Plane& dst = out.planes[static_cast<std::size_t>(c)];
    for (int j = 0; j < g.chroma_height(); ++j) {
      for (int i = 0; i < g.chroma_width(); ++i) {
        const int x = 2 * i;
        const int xl = std::max(x - 1, 0), xr = std::min(x + 1, w - 1);
        int acc = 0;
        for (int k = 0; k < 4; ++k) {
          const int y = std::clamp(2 * j - 1 + k, 0, h - 1);
          acc += kV[k] * (in.at(xl, y) + 2 * in.at(x, y) + in.at(xr, y));
        }
        dst.at(i, j) = static_cast<std::uint16_t>((acc + 16) / 32);
      }
    }
  }
  return out;
}

}  // namespace omni360
