#include "hdmr/coupling.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "hdmr/errors.hpp"
#include "hdmr/sobol.hpp"

namespace hdmr {
namespace {

void check_order(int dimension, int order) {
  if (dimension < 1) {
    throw InvalidOrder("coupling: dimension must be >= 1, got " + std::to_string(dimension));
  }
  if (order < 1 || order > dimension) {
    throw InvalidOrder("coupling: order d=" + std::to_string(order) +
                       " must lie in [1, D=" + std::to_string(dimension) + "]");
  }
}

bool valid_subset(const Subset& s, int dimension) {
  if (s.empty()) return false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] < 0 || s[i] >= dimension) return false;
    if (i > 0 && s[i] <= s[i - 1]) return false;
  }
  return true;
}

}  // namespace

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / i;
  return r;
}

std::vector<Subset> enumerate_subsets(int dimension, int order) {
  check_order(dimension, order);
  std::vector<Subset> out;
  out.reserve(binomial(dimension, order));
  Subset s(order);
  for (int i = 0; i < order; ++i) s[i] = i;
  while (true) {
    out.push_back(s);
    int i = order - 1;
    while (i >= 0 && s[i] == dimension - order + i) --i;
    if (i < 0) break;
    ++s[i];
    for (int j = i + 1; j < order; ++j) s[j] = s[j - 1] + 1;
  }
  return out;
}

double FeatureRow::weight_at(int coordinate) const {
  for (std::size_t k = 0; k < subset.size(); ++k) {
    if (subset[k] == coordinate) return weights[k];
  }
  return 0.0;
}

FeatureMap::FeatureMap(FeatureMapConfig config, std::vector<FeatureRow> rows)
    : config_(std::move(config)), rows_(std::move(rows)) {
  for (const auto& r : rows_) {
    if (!valid_subset(r.subset, config_.dimension) || r.weights.size() != r.subset.size()) {
      throw InvalidArgument("feature map: malformed row");
    }
  }
}

Matrix FeatureMap::dense_weights() const {
  Matrix w = Matrix::Zero(static_cast<Eigen::Index>(rows_.size()), config_.dimension);
  for (std::size_t j = 0; j < rows_.size(); ++j) {
    const auto& r = rows_[j];
    for (std::size_t k = 0; k < r.subset.size(); ++k) {
      w(static_cast<Eigen::Index>(j), r.subset[k]) = r.weights[k];
    }
  }
  return w;
}

Matrix FeatureMap::map(const Matrix& x) const {
  if (x.cols() != config_.dimension) {
    throw ShapeError("map_features: input has " + std::to_string(x.cols()) +
                     " columns, feature map expects D=" + std::to_string(config_.dimension));
  }
  const Eigen::Index n = x.rows();
  const auto f = static_cast<Eigen::Index>(rows_.size());
  Matrix y(n, f);
  // Sparse dot products in subset order, so each value is independent of
  // the other rows of W.
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < f; ++j) {
      const auto& r = rows_[static_cast<std::size_t>(j)];
      double acc = 0.0;
      for (std::size_t k = 0; k < r.subset.size(); ++k) acc += r.weights[k] * x(i, r.subset[k]);
      y(i, j) = acc;
    }
  }
  return y;
}

FeatureMap build_feature_map(const FeatureMapConfig& config) {
  check_order(config.dimension, config.order);
  if (config.neurons_per_term < 0) {
    throw InvalidArgument("coupling: neurons per term must be >= 0");
  }
  for (const auto& s : config.excluded) {
    if (!valid_subset(s, config.dimension) || static_cast<int>(s.size()) != config.order) {
      throw InvalidArgument("coupling: excluded subset is not a valid order-d subset");
    }
  }
  for (const auto& [s, n] : config.neurons_override) {
    if (!valid_subset(s, config.dimension) || static_cast<int>(s.size()) != config.order || n < 0) {
      throw InvalidArgument("coupling: invalid per-term neuron override");
    }
  }

  std::vector<FeatureRow> rows;
  for (int i = 0; i < config.dimension; ++i) {
    rows.push_back({FeatureKind::kOriginal, {i}, {1.0}, std::nullopt});
  }
  if (config.order >= 2) {
    const std::set<Subset> excluded(config.excluded.begin(), config.excluded.end());
    SobolStream stream(config.order, config.sobol_skip);
    std::vector<double> point;
    for (const auto& subset : enumerate_subsets(config.dimension, config.order)) {
      if (excluded.contains(subset)) continue;
      int n = config.neurons_per_term;
      if (auto it = config.neurons_override.find(subset); it != config.neurons_override.end()) {
        n = it->second;
      }
      for (int k = 0; k < n; ++k) {
        const std::uint64_t index = stream.cursor();
        stream.next(point);
        rows.push_back({FeatureKind::kCoupled, subset, point, index});
      }
    }
  }
  return FeatureMap(config, std::move(rows));
}

FeatureMap build_feature_map(int dimension, int order, int neurons_per_term,
                             std::uint64_t sobol_skip) {
  FeatureMapConfig config;
  config.dimension = dimension;
  config.order = order;
  config.neurons_per_term = neurons_per_term;
  config.sobol_skip = sobol_skip;
  return build_feature_map(config);
}

}  // namespace hdmr
