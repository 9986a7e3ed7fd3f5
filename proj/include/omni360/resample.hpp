#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "omni360/frame.hpp"
#include "omni360/projection.hpp"

namespace omni360 {

enum class KernelFamily { kNearest, kBilinear, kLanczos };

struct Kernel {
  KernelFamily family = KernelFamily::kLanczos;
  int taps = 3;  // half-width in source pixels

  static Kernel nearest() { return {KernelFamily::kNearest, 1}; }
  static Kernel bilinear() { return {KernelFamily::kBilinear, 1}; }
  static Kernel lanczos(int taps) { return {KernelFamily::kLanczos, taps}; }

  bool operator==(const Kernel&) const = default;
};

const char* to_string(KernelFamily f);
// "nearest", "bilinear", "lanczos3", "lanczos2", ...
Kernel parse_kernel(const std::string& name);
std::string to_string(const Kernel& k);

// Unnormalized 1-D weight at signed distance x (source pixels).
double kernel_weight(const Kernel& k, double x);

// Lanczos-2 for chroma when luma uses lanczos, the luma kernel otherwise.
Kernel chroma_kernel_for(const Kernel& luma);

struct ResampleOptions {
  Kernel luma = Kernel::lanczos(3);
  Kernel chroma = Kernel::lanczos(2);
  int threads = 0;  // 0: hardware concurrency
};

// Geometric resampler between two projection formats. Destination sample
// positions in the source frame are cached per (source spec, destination spec,
// plane siting) and shared across calls; the cache is safe for concurrent use.
class Resampler {
 public:
  explicit Resampler(ResampleOptions options = {});
  ~Resampler();

  Resampler(const Resampler&) = delete;
  Resampler& operator=(const Resampler&) = delete;

  // All frames must share the geometry of src_spec.coded_geometry (width and
  // height). Output takes width/height from dst_spec and keeps the source's
  // bit depth and chroma format.
  std::vector<Frame> resample(std::span<const Frame> src, const ProjectionSpec& src_spec,
                              const ProjectionSpec& dst_spec) const;

  const ResampleOptions& options() const { return options_; }

 private:
  struct CoordinateMap;
  std::shared_ptr<const CoordinateMap> coordinate_map(const ProjectionSpec& src_spec,
                                                      const ProjectionSpec& dst_spec,
                                                      bool chroma420) const;

  ResampleOptions options_;
  mutable std::mutex cache_mutex_;
  mutable std::map<std::string, std::shared_ptr<const CoordinateMap>> cache_;
};

// One-shot convenience; the chroma kernel follows chroma_kernel_for(kernel).
Frame resample_frame(const Frame& src, const ProjectionSpec& src_spec,
                     const ProjectionSpec& dst_spec, const Kernel& kernel);

// Chroma siting: even luma column, between luma rows 2j and 2j + 1.
Frame chroma_420_to_444(const Frame& f);
Frame chroma_444_to_420(const Frame& f);

}  // namespace omni360
