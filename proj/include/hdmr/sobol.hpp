#pragma once

#include <cstdint>
#include <vector>

#include "hdmr/types.hpp"

namespace hdmr {

inline constexpr int kMaxSobolDimension = 64;

/// Unscrambled Sobol sequence in Gray-code order with Joe-Kuo
/// (new-joe-kuo-6.21201) direction numbers and 32-bit resolution.
///
/// Point index 0 (the origin) is never emitted: a stream created with
/// `skip = s` emits indices s+1, s+2, ... Emission depends only on
/// (dimension, cursor).
class SobolStream {
 public:
  explicit SobolStream(int dimension, std::uint64_t skip = 0);

  int dimension() const noexcept { return dimension_; }
  /// Index of the next point to be emitted.
  std::uint64_t cursor() const noexcept { return cursor_; }

  /// Writes the next point into `out` (size `dimension()`), values in [0, 1).
  void next(std::vector<double>& out);
  std::vector<double> next();

 private:
  void seek(std::uint64_t index);

  int dimension_;
  std::uint64_t cursor_ = 0;
  std::vector<std::uint32_t> directions_;  // dimension_ x 32, row-major
  std::vector<std::uint32_t> state_;       // integer coordinates of cursor_ - 1
};

/// Points with indices skip+1 ... skip+count as a count x dimension matrix.
Matrix sobol_points(int dimension, std::uint64_t count, std::uint64_t skip = 0);

}  // namespace hdmr
