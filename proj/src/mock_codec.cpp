#include <algorithm>
#include <string>

#include "omni360/codec.hpp"
#include "omni360/error.hpp"

namespace omni360 {
namespace {

constexpr std::uint32_t kMagic = 0x4f4d5131;  // "OMQ1"

class BitWriter {
 public:
  void put_bits(std::uint64_t value, int count) {
    for (int i = count - 1; i >= 0; --i) put_bit(static_cast<int>((value >> i) & 1u));
  }
  void put_ue(std::uint64_t n) {
    const std::uint64_t v = n + 1;
    int len = 0;
    while ((v >> (len + 1)) != 0) ++len;
    put_bits(0, len);
    put_bits(v, len + 1);
  }
  void put_se(long long v) {
    put_ue(v > 0 ? static_cast<std::uint64_t>(2 * v - 1) : static_cast<std::uint64_t>(-2 * v));
  }
  long long bits() const { return bits_; }
  std::vector<std::uint8_t> finish() {
    std::vector<std::uint8_t> out = bytes_;
    return out;
  }

 private:
  void put_bit(int b) {
    if (bits_ % 8 == 0) bytes_.push_back(0);
    if (b) bytes_.back() |= static_cast<std::uint8_t>(0x80u >> (bits_ % 8));
    ++bits_;
  }
  std::vector<std::uint8_t> bytes_;
  long long bits_ = 0;
};

class BitReader {
 public:
  BitReader(const std::vector<std::uint8_t>& bytes, long long bits)
      : bytes_(bytes), limit_(std::min(bits, static_cast<long long>(bytes.size()) * 8)) {}

  int get_bit() {
    OMNI360_REQUIRE(pos_ < limit_, ErrorKind::kData, "mock bitstream ended early");
    const int b = (bytes_[static_cast<std::size_t>(pos_ / 8)] >> (7 - pos_ % 8)) & 1;
    ++pos_;
    return b;
  }
  std::uint64_t get_bits(int count) {
    std::uint64_t v = 0;
    for (int i = 0; i < count; ++i) v = (v << 1) | static_cast<std::uint64_t>(get_bit());
    return v;
  }
  std::uint64_t get_ue() {
    int len = 0;
    while (get_bit() == 0) {
      ++len;
      OMNI360_REQUIRE(len < 63, ErrorKind::kData, "corrupt exp-Golomb code");
    }
    const std::uint64_t rest = get_bits(len);
    return ((std::uint64_t{1} << len) | rest) - 1;
  }
  long long position() const { return pos_; }
  long long get_se() {
    const std::uint64_t n = get_ue();
    return (n & 1u) ? static_cast<long long>((n + 1) / 2) : -static_cast<long long>(n / 2);
  }

 private:
  const std::vector<std::uint8_t>& bytes_;
  long long limit_;
  long long pos_ = 0;
};

std::uint16_t reconstruct(long long index, int step, int max_value) {
  const long long v = index * step + step / 2;
  return static_cast<std::uint16_t>(std::min<long long>(v, max_value));
}

}  // namespace

int mock_quant_step(int q, int bit_depth) {
  OMNI360_REQUIRE(q >= 0 && q <= 3, ErrorKind::kContract,
                  "mock quantizer quality index must be in {0,1,2,3}, got " + std::to_string(q));
  return (1 << (5 - q)) << (bit_depth - 8);
}

MockBitstream mock_encode(std::span<const Frame> frames, int q) {
  OMNI360_REQUIRE(!frames.empty(), ErrorKind::kContract, "mock encoder needs frames");
  const FrameGeometry& g = frames.front().geometry;
  const int step = mock_quant_step(q, g.bit_depth);
  BitWriter w;
  w.put_bits(kMagic, 32);
  w.put_ue(static_cast<std::uint64_t>(g.width));
  w.put_ue(static_cast<std::uint64_t>(g.height));
  w.put_ue(static_cast<std::uint64_t>(g.bit_depth));
  w.put_ue(g.chroma == ChromaFormat::k420 ? 0u : 1u);
  w.put_ue(static_cast<std::uint64_t>(q));
  w.put_ue(frames.size());
  for (const Frame& f : frames) {
    OMNI360_REQUIRE(f.geometry == g, ErrorKind::kContract, "mock encoder: mixed geometries");
    for (const Plane& p : f.planes) {
      std::uint64_t run = 0;
      long long row_head = 0;  // index of the previous row's first sample
      for (int y = 0; y < p.height; ++y) {
        long long left = row_head;
        for (int x = 0; x < p.width; ++x) {
          const long long index = p.at(x, y) / step;
          const long long residual = index - left;
          if (x == 0) row_head = index;
          left = index;
          if (residual == 0) {
            ++run;
          } else {
            w.put_ue(run);
            w.put_se(residual);
            run = 0;
          }
        }
      }
      if (run > 0) w.put_ue(run);
    }
  }
  MockBitstream out;
  out.bits = w.bits();
  out.bytes = w.finish();
  return out;
}

std::vector<Frame> mock_decode(const MockBitstream& stream) {
  BitReader r(stream.bytes, stream.bits);
  OMNI360_REQUIRE(r.get_bits(32) == kMagic, ErrorKind::kData, "not a mock bitstream");
  FrameGeometry g;
  g.width = static_cast<int>(r.get_ue());
  g.height = static_cast<int>(r.get_ue());
  g.bit_depth = static_cast<int>(r.get_ue());
  g.chroma = r.get_ue() == 0 ? ChromaFormat::k420 : ChromaFormat::k444;
  const int q = static_cast<int>(r.get_ue());
  const auto count = r.get_ue();
  validate(g);
  const int step = mock_quant_step(q, g.bit_depth);
  const int max_value = g.max_value();
  std::vector<Frame> frames;
  for (std::uint64_t n = 0; n < count; ++n) {
    Frame f(g);
    for (Plane& p : f.planes) {
      const long long total = static_cast<long long>(p.samples.size());
      std::vector<long long> residual(static_cast<std::size_t>(total), 0);
      long long pos = 0;
      while (pos < total) {
        const auto run = static_cast<long long>(r.get_ue());
        OMNI360_REQUIRE(pos + run <= total, ErrorKind::kData, "zero run overflows the plane");
        pos += run;
        if (pos == total) break;
        residual[static_cast<std::size_t>(pos++)] = r.get_se();
      }
      long long row_head = 0;
      for (int y = 0; y < p.height; ++y) {
        long long left = row_head;
        for (int x = 0; x < p.width; ++x) {
          const long long index = left + residual[static_cast<std::size_t>(y) * p.width + x];
          if (x == 0) row_head = index;
          left = index;
          p.at(x, y) = reconstruct(index, step, max_value);
        }
      }
    }
    frames.push_back(std::move(f));
  }
  OMNI360_REQUIRE(r.position() == stream.bits, ErrorKind::kData, "trailing data in mock bitstream");
  return frames;
}

CodecOutput mock_quantizer_codec(std::span<const Frame> frames, int q) {
  MockBitstream stream = mock_encode(frames, q);
  CodecOutput out;
  out.bits = stream.bits;
  out.recon = mock_decode(stream);
  return out;
}

}  // namespace omni360
