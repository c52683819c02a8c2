#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace hdmr {

/// xoshiro256** (Blackman & Vigna) seeded through splitmix64. All randomness
/// in the library flows through this generator, so splits and synthetic
/// datasets reproduce bit-exactly across platforms and standard libraries.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed);

  std::uint64_t operator()();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer in [0, bound) by rejection (no modulo bias).
  std::uint64_t below(std::uint64_t bound);
  /// Standard normal deviate (Box-Muller, one value per two uniforms).
  double normal();

  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }

 private:
  std::array<std::uint64_t, 4> s_;
};

/// Fisher-Yates permutation of 0..n-1.
std::vector<std::size_t> random_permutation(std::size_t n, std::uint64_t seed);

}  // namespace hdmr
