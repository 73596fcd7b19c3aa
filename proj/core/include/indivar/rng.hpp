#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace indivar {

/// Philox4x32-10 counter-based generator.
///
/// Streams are addressed by (seed, stream): draws depend only on the key and
/// the draw counter, so realizations simulated on different threads or in a
/// different order produce identical values.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key0_(static_cast<std::uint32_t>(seed)),
        key1_(static_cast<std::uint32_t>(seed >> 32)),
        stream_(stream) {}

  std::uint64_t seed() const {
    return (static_cast<std::uint64_t>(key1_) << 32) | key0_;
  }
  std::uint64_t stream() const { return stream_; }

  std::uint64_t next_u64() {
    if ((counter_ & 1) == 0) {
      block_ = philox_block(counter_ >> 1);
    }
    const int half = static_cast<int>(counter_ & 1);
    ++counter_;
    return (static_cast<std::uint64_t>(block_[2 * half + 1]) << 32) |
           block_[2 * half];
  }

  /// Uniform in [0,1), 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform in (0,1); safe as a log() argument.
  double next_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; consumes exactly two uniforms.
  double next_normal() {
    const double u1 = next_open();
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  /// Uniform integer in [0, n) by 64x64 multiply-shift.
  std::uint32_t next_below(std::uint32_t n) {
    const std::uint64_t x = next_u64() >> 32;
    return static_cast<std::uint32_t>((x * n) >> 32);
  }

  /// Poisson by Knuth's product-of-uniforms method.
  long next_poisson(double mean) {
    const double limit = std::exp(-mean);
    long k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= next_open();
    } while (p > limit);
    return k - 1;
  }

 private:
  std::array<std::uint32_t, 4> philox_block(std::uint64_t block_index) const {
    std::uint32_t c0 = static_cast<std::uint32_t>(block_index);
    std::uint32_t c1 = static_cast<std::uint32_t>(block_index >> 32);
    std::uint32_t c2 = static_cast<std::uint32_t>(stream_);
    std::uint32_t c3 = static_cast<std::uint32_t>(stream_ >> 32);
    std::uint32_t k0 = key0_, k1 = key1_;
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = 0xD2511F53ULL * c0;
      const std::uint64_t p1 = 0xCD9E8D57ULL * c2;
      const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
      const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
      const std::uint32_t n0 = hi1 ^ c1 ^ k0;
      const std::uint32_t n1 = lo1;
      const std::uint32_t n2 = hi0 ^ c3 ^ k1;
      const std::uint32_t n3 = lo0;
      c0 = n0;
      c1 = n1;
      c2 = n2;
      c3 = n3;
      k0 += 0x9E3779B9U;
      k1 += 0xBB67AE85U;
    }
    return {c0, c1, c2, c3};
  }

  std::uint32_t key0_, key1_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> block_{};
};

}  // namespace indivar
