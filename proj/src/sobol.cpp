#include "hdmr/sobol.hpp"

#include <bit>
#include <string>

#include "hdmr/errors.hpp"
#include "sobol_directions.hpp"

namespace hdmr {
namespace {

constexpr int kBits = 32;
constexpr double kScale = 1.0 / 4294967296.0;  // 2^-32
constexpr std::uint64_t kMaxIndex = (std::uint64_t{1} << kBits) - 1;

void fill_directions(int dim, std::uint32_t* v) {
  if (dim == 0) {
    for (int k = 0; k < kBits; ++k) v[k] = std::uint32_t{1} << (kBits - 1 - k);
    return;
  }
  const auto& entry = detail::kJoeKuoDirections[dim - 1];
  const int s = entry.degree;
  for (int k = 0; k < s && k < kBits; ++k) {
    v[k] = entry.initial[k] << (kBits - 1 - k);
  }
  for (int k = s; k < kBits; ++k) {
    std::uint32_t value = v[k - s] ^ (v[k - s] >> s);
    for (int j = 1; j < s; ++j) {
      if ((entry.coefficients >> (s - 1 - j)) & 1u) value ^= v[k - j];
    }
    v[k] = value;
  }
}

}  // namespace

SobolStream::SobolStream(int dimension, std::uint64_t skip)
    : dimension_(dimension) {
  if (dimension < 1 || dimension > kMaxSobolDimension) {
    throw UnsupportedDimension("sobol: dimension " + std::to_string(dimension) +
                               " outside supported range [1, " +
                               std::to_string(kMaxSobolDimension) + "]");
  }
  if (skip >= kMaxIndex) {
    throw InvalidArgument("sobol: skip exceeds the 2^32 point period");
  }
  directions_.resize(static_cast<std::size_t>(dimension) * kBits);
  for (int j = 0; j < dimension; ++j) fill_directions(j, &directions_[j * kBits]);
  state_.assign(dimension, 0);
  seek(skip + 1);
}

void SobolStream::seek(std::uint64_t index) {
  // State holds the integer coordinates of point index - 1; Gray code g(n)
  // selects which direction numbers are XORed together.
  const std::uint64_t prev = index - 1;
  const std::uint64_t gray = prev ^ (prev >> 1);
  for (int j = 0; j < dimension_; ++j) {
    std::uint32_t x = 0;
    for (int k = 0; k < kBits; ++k) {
      if ((gray >> k) & 1u) x ^= directions_[j * kBits + k];
    }
    state_[j] = x;
  }
  cursor_ = index;
}

void SobolStream::next(std::vector<double>& out) {
  if (cursor_ > kMaxIndex) {
    throw InvalidArgument("sobol: sequence exhausted (2^32 points)");
  }
  // Point n differs from point n-1 by the direction number at the position
  // of the lowest zero bit of n-1.
  const int c = std::countr_one(cursor_ - 1);
  out.resize(dimension_);
  for (int j = 0; j < dimension_; ++j) {
    state_[j] ^= directions_[j * kBits + c];
    out[j] = static_cast<double>(state_[j]) * kScale;
  }
  ++cursor_;
}

std::vector<double> SobolStream::next() {
  std::vector<double> out;
  next(out);
  return out;
}

Matrix sobol_points(int dimension, std::uint64_t count, std::uint64_t skip) {
  SobolStream stream(dimension, skip);
  Matrix points(static_cast<Eigen::Index>(count), dimension);
  std::vector<double> row;
  for (std::uint64_t i = 0; i < count; ++i) {
    stream.next(row);
    for (int j = 0; j < dimension; ++j) points(static_cast<Eigen::Index>(i), j) = row[j];
  }
  return points;
}

}  // namespace hdmr
