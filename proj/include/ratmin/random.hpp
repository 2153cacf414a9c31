#pragma once

#include <cstdint>

namespace ratmin {

/// Counter-based generator: the i-th draw of stream s under seed k is
/// splitmix64(k ^ mix(s) + i * golden), so every value is a pure function of
/// (seed, stream, index) and records reproduce across platforms.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept;
  /// Standard normal via Box-Muller (two uniforms per draw, no caching).
  double gaussian() noexcept;

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace ratmin
