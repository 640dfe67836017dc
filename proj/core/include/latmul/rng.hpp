#pragma once

#include <cmath>
#include <cstdint>

namespace latmul {

/// Counter-based generator built on the SplitMix64 finalizer. Each (seed,
/// stream) pair yields an independent deterministic sequence, so parallel
/// consumers can derive their own stream without shared state.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(mix(seed ^ mix(stream ^ 0x9e3779b97f4a7c15ull))) {}

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t next_u64() { return mix(key_ ^ (counter_++ * 0xd1342543de82ef95ull)); }

  /// Uniform double in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller (cached pair member).
  double next_gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 in (0,1] so log() is finite
    double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    double u2 = next_double();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Stream-id conventions so that A-side and B-side draws never collide.
namespace streams {
inline constexpr std::uint64_t kDitherA = 0x01;
inline constexpr std::uint64_t kDitherB = 0x02;
inline constexpr std::uint64_t kSigns = 0x03;
inline constexpr std::uint64_t kMatrixA = 0x100;
inline constexpr std::uint64_t kMatrixB = 0x200;

inline std::uint64_t column(std::uint64_t base, std::uint64_t col) {
  return base + (col << 16);
}
inline std::uint64_t dither_block(std::uint64_t base, std::uint64_t block) {
  return base + (block << 16);
}
}  // namespace streams

}  // namespace latmul
