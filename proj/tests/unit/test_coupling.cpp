#include <doctest.h>

#include <map>
#include <random>

#include "hdmr/coupling.hpp"
#include "hdmr/errors.hpp"
#include "hdmr/sobol.hpp"

using namespace hdmr;

TEST_CASE("enumerate_subsets") {
  CHECK(enumerate_subsets(3, 2) == std::vector<Subset>{{0, 1}, {0, 2}, {1, 2}});
  CHECK(enumerate_subsets(6, 3).size() == 20);
  CHECK(enumerate_subsets(6, 6) == std::vector<Subset>{{0, 1, 2, 3, 4, 5}});
  CHECK(enumerate_subsets(4, 1) == std::vector<Subset>{{0}, {1}, {2}, {3}});

  // Table of C(6, d): 6, 15, 20, 15, 6, 1.
  const int expected[] = {6, 15, 20, 15, 6, 1};
  for (int d = 1; d <= 6; ++d) CHECK(enumerate_subsets(6, d).size() == expected[d - 1]);

  const auto all = enumerate_subsets(7, 3);
  CHECK(std::is_sorted(all.begin(), all.end()));
  CHECK(std::adjacent_find(all.begin(), all.end()) == all.end());

  CHECK_THROWS_AS(enumerate_subsets(3, 4), InvalidOrder);
  CHECK_THROWS_AS(enumerate_subsets(3, 0), InvalidOrder);
}

TEST_CASE("feature map row counts") {
  CHECK(build_feature_map(3, 2, 2).feature_count() == 9);
  CHECK(build_feature_map(6, 4, 20).feature_count() == 306);

  const auto first_order = build_feature_map(3, 1, 50);
  CHECK(first_order.feature_count() == 3);
  for (const auto& r : first_order.rows()) CHECK(r.kind == FeatureKind::kOriginal);

  CHECK(build_feature_map(4, 2, 0).feature_count() == 4);
  CHECK_THROWS_AS(build_feature_map(6, 7, 10), InvalidOrder);
  CHECK_THROWS_AS(build_feature_map(3, 2, -1), InvalidArgument);
}

TEST_CASE("row structure: sparsity, order and provenance") {
  const int D = 5, d = 3, N = 4;
  const auto map = build_feature_map(D, d, N, 3);
  const auto subsets = enumerate_subsets(D, d);
  REQUIRE(map.feature_count() == D + N * subsets.size());

  for (int i = 0; i < D; ++i) {
    const auto& r = map.row(i);
    CHECK(r.kind == FeatureKind::kOriginal);
    CHECK(r.subset == Subset{i});
    CHECK(r.weights == std::vector<double>{1.0});
    CHECK_FALSE(r.sobol_index.has_value());
  }

  // One shared stream, consumed across subsets in order.
  const Matrix sobol = sobol_points(d, N * subsets.size(), 3);
  std::map<Subset, int> group_sizes;
  for (std::size_t k = 0; k < N * subsets.size(); ++k) {
    const auto& r = map.row(D + k);
    CHECK(r.kind == FeatureKind::kCoupled);
    CHECK(r.subset == subsets[k / N]);
    CHECK(r.sobol_index == 3 + 1 + k);
    ++group_sizes[r.subset];
    for (int c = 0; c < d; ++c) {
      CHECK(r.weights[c] == sobol(static_cast<Eigen::Index>(k), c));
      CHECK(r.weights[c] > 0.0);
      CHECK(r.weights[c] < 1.0);
    }
  }
  CHECK(group_sizes.size() == subsets.size());
  for (const auto& [s, n] : group_sizes) CHECK(n == N);

  const Matrix w = map.dense_weights();
  for (Eigen::Index j = 0; j < w.rows(); ++j) {
    const auto& r = map.row(j);
    Subset nz;
    for (int c = 0; c < D; ++c)
      if (w(j, c) != 0.0) nz.push_back(c);
    CHECK(nz == r.subset);
  }
}

TEST_CASE("feature map is deterministic") {
  const auto a = build_feature_map(6, 3, 7, 11);
  const auto b = build_feature_map(6, 3, 7, 11);
  CHECK(a.dense_weights() == b.dense_weights());
  const auto c = build_feature_map(6, 3, 7, 12);
  CHECK(a.dense_weights() != c.dense_weights());
}

TEST_CASE("exclusions and per-term overrides") {
  FeatureMapConfig cfg;
  cfg.dimension = 4;
  cfg.order = 2;
  cfg.neurons_per_term = 3;
  cfg.excluded = {{0, 3}};
  cfg.neurons_override[{1, 2}] = 5;
  const auto map = build_feature_map(cfg);
  CHECK(map.feature_count() == 4 + 4 * 3 + 5);
  for (const auto& r : map.rows()) CHECK(r.subset != Subset{0, 3});

  cfg.excluded = {{0, 0}};
  CHECK_THROWS_AS(build_feature_map(cfg), InvalidArgument);
}

TEST_CASE("map_features") {
  const auto map = build_feature_map(3, 2, 2);
  Matrix x(2, 3);
  x << 0.1, 0.2, 0.3, 0, 0, 0;
  const Matrix y = map_features(map, x);
  REQUIRE(y.cols() == 9);
  for (int i = 0; i < 3; ++i) CHECK(y(0, i) == x(0, i));
  CHECK(y.row(1).isZero(0.0));

  // Coupled feature is the dot product with its weights.
  const auto& r = map.row(3);
  CHECK(y(0, 3) == doctest::Approx(r.weights[0] * x(0, r.subset[0]) +
                                   r.weights[1] * x(0, r.subset[1])));

  Matrix wrong(1, 4);
  CHECK_THROWS_AS(map_features(map, wrong), ShapeError);
}

TEST_CASE("D=2 single coupled neuron") {
  const auto map = build_feature_map(2, 2, 1);
  const auto& r = map.row(2);
  Matrix x(1, 2);
  x << 3.0, -2.0;
  CHECK(map.map(x)(0, 2) == r.weights[0] * 3.0 + r.weights[1] * -2.0);
}

TEST_CASE("map_features is linear") {
  const auto map = build_feature_map(5, 2, 6);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix x1(7, 5), x2(7, 5);
    for (Eigen::Index i = 0; i < x1.size(); ++i) {
      x1.data()[i] = u(gen);
      x2.data()[i] = u(gen);
    }
    const double a = u(gen), b = u(gen);
    const Matrix lhs = map.map(a * x1 + b * x2);
    const Matrix rhs = a * map.map(x1) + b * map.map(x2);
    const double scale = std::max(1.0, lhs.cwiseAbs().maxCoeff());
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12 * scale);
  }
}
