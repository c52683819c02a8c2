#pragma once

#include <array>
#include <cstdint>

#include "hdmr/sobol.hpp"

namespace hdmr::detail {

inline constexpr int kMaxPolyDegree = 18;

struct DirectionEntry {
  int degree;
  std::uint32_t coefficients;
  std::array<std::uint32_t, kMaxPolyDegree> initial;
};

extern const std::array<DirectionEntry, kMaxSobolDimension - 1> kJoeKuoDirections;

}  // namespace hdmr::detail
