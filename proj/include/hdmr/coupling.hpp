#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "hdmr/types.hpp"

namespace hdmr {

/// Strictly increasing 0-based coordinate indices.
using Subset = std::vector<int>;

/// All C(D, d) subsets of {0..D-1} of size d in lexicographic order.
std::vector<Subset> enumerate_subsets(int dimension, int order);

std::uint64_t binomial(int n, int k);

enum class FeatureKind { kOriginal, kCoupled };

/// One hidden neuron: y = weights . x, with nonzeros exactly at `subset`.
struct FeatureRow {
  FeatureKind kind = FeatureKind::kOriginal;
  Subset subset;
  /// Nonzero weight values, aligned with `subset`.
  std::vector<double> weights;
  /// Sobol point index the weights were taken from (coupled rows only).
  std::optional<std::uint64_t> sobol_index;

  double weight_at(int coordinate) const;
};

struct FeatureMapConfig {
  int dimension = 0;
  int order = 1;
  int neurons_per_term = 0;
  std::uint64_t sobol_skip = 0;
  /// Coupling terms left out of the map entirely.
  std::vector<Subset> excluded;
  /// Per-term overrides of `neurons_per_term`.
  std::map<Subset, int> neurons_override;
};

/// Rule-based sparse weight matrix. Original-coordinate rows come first,
/// then `N` Sobol-weighted rows per coupling subset in lexicographic order.
/// A single d-dimensional Sobol stream is consumed across all subsets.
class FeatureMap {
 public:
  FeatureMap() = default;
  FeatureMap(FeatureMapConfig config, std::vector<FeatureRow> rows);

  const FeatureMapConfig& config() const noexcept { return config_; }
  int dimension() const noexcept { return config_.dimension; }
  int order() const noexcept { return config_.order; }
  int neurons_per_term() const noexcept { return config_.neurons_per_term; }

  std::size_t feature_count() const noexcept { return rows_.size(); }
  const std::vector<FeatureRow>& rows() const noexcept { return rows_; }
  const FeatureRow& row(std::size_t j) const { return rows_.at(j); }

  /// Dense F x D weight matrix W.
  Matrix dense_weights() const;

  /// Y = X W^T, one column per row of the map.
  Matrix map(const Matrix& x) const;

 private:
  FeatureMapConfig config_;
  std::vector<FeatureRow> rows_;
};

FeatureMap build_feature_map(const FeatureMapConfig& config);
FeatureMap build_feature_map(int dimension, int order, int neurons_per_term,
                             std::uint64_t sobol_skip = 0);

inline Matrix map_features(const FeatureMap& map, const Matrix& x) { return map.map(x); }

}  // namespace hdmr
