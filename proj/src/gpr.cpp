#include "hdmr/gpr.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include <Eigen/Cholesky>

#include "hdmr/errors.hpp"

namespace hdmr {
namespace {

void check_length_scale(double l) {
  if (!(l > 0.0) || !std::isfinite(l)) {
    throw InvalidHyperparameter("gpr: length scale must be positive and finite, got " +
                                std::to_string(l));
  }
}

// All kernel evaluations go through this, so every route sees identical
// per-feature values.
inline double se(double diff, double inv_two_l2) { return std::exp(-(diff * diff) * inv_two_l2); }

inline double inv_two_l2(double l) { return 1.0 / (2.0 * l * l); }

// Kernel sums accumulate in extended precision: the mean and its per-feature
// split then agree far below double rounding of the individual products, and
// Gram entries do not depend on feature order.
using Accum = long double;

inline Accum additive_row(const double* a, const double* b, Eigen::Index f, double c) {
  Accum acc = 0.0L;
  for (Eigen::Index j = 0; j < f; ++j) acc += se(a[j] - b[j], c);
  return acc;
}

}  // namespace

double kernel_1d(double a, double b, double length_scale) {
  check_length_scale(length_scale);
  return se(a - b, inv_two_l2(length_scale));
}

double kernel_additive(std::span<const double> ya, std::span<const double> yb,
                       double length_scale) {
  check_length_scale(length_scale);
  if (ya.size() != yb.size()) {
    throw ShapeError("kernel_additive: feature vectors differ in length (" +
                     std::to_string(ya.size()) + " vs " + std::to_string(yb.size()) + ")");
  }
  return static_cast<double>(additive_row(ya.data(), yb.data(),
                                          static_cast<Eigen::Index>(ya.size()),
                                          inv_two_l2(length_scale)));
}

Eigen::MatrixXd gram_matrix(const Matrix& y, double length_scale) {
  check_length_scale(length_scale);
  if (y.rows() < 1) throw ShapeError("gram_matrix: need at least one row");
  const Eigen::Index m = y.rows();
  const Eigen::Index f = y.cols();
  const double c = inv_two_l2(length_scale);
  Eigen::MatrixXd k(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    const double* ra = y.row(a).data();
    k(a, a) = static_cast<double>(additive_row(ra, ra, f, c));
    for (Eigen::Index b = a + 1; b < m; ++b) {
      const auto v = static_cast<double>(additive_row(ra, y.row(b).data(), f, c));
      k(a, b) = v;
      k(b, a) = v;
    }
  }
  return k;
}

AdditiveGprModel::AdditiveGprModel(Matrix ytrain, Vector alpha, double length_scale,
                                   double noise, double noise_used, double target_offset)
    : ytrain_(std::move(ytrain)),
      alpha_(std::move(alpha)),
      length_scale_(length_scale),
      noise_(noise),
      noise_used_(noise_used),
      target_offset_(target_offset) {
  check_length_scale(length_scale_);
  if (!(noise_ > 0.0) || !(noise_used_ > 0.0)) {
    throw InvalidHyperparameter("gpr: noise must be positive");
  }
  if (alpha_.size() != ytrain_.rows()) {
    throw ShapeError("gpr: alpha length does not match training rows");
  }
}

Vector AdditiveGprModel::predict(const Matrix& ystar) const {
  if (ystar.cols() != ytrain_.cols()) {
    throw ShapeError("gpr_predict: input has " + std::to_string(ystar.cols()) +
                     " features, model has " + std::to_string(ytrain_.cols()));
  }
  const double c = inv_two_l2(length_scale_);
  const Eigen::Index f = ytrain_.cols();
  Vector mu(ystar.rows());
  for (Eigen::Index n = 0; n < ystar.rows(); ++n) {
    const double* rn = ystar.row(n).data();
    Accum acc = 0.0L;
    for (Eigen::Index m = 0; m < ytrain_.rows(); ++m) {
      acc += static_cast<Accum>(alpha_[m]) * additive_row(rn, ytrain_.row(m).data(), f, c);
    }
    mu[n] = static_cast<double>(target_offset_ + acc);
  }
  return mu;
}

Vector AdditiveGprModel::component(Eigen::Index feature, std::span<const double> grid) const {
  if (feature < 0 || feature >= ytrain_.cols()) {
    throw InvalidArgument("gpr_component: feature index " + std::to_string(feature) +
                          " out of range [0, " + std::to_string(ytrain_.cols()) + ")");
  }
  const double c = inv_two_l2(length_scale_);
  Vector out(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t g = 0; g < grid.size(); ++g) {
    Accum acc = 0.0L;
    for (Eigen::Index m = 0; m < ytrain_.rows(); ++m) {
      acc += static_cast<Accum>(alpha_[m]) * se(grid[g] - ytrain_(m, feature), c);
    }
    out[static_cast<Eigen::Index>(g)] = static_cast<double>(acc);
  }
  return out;
}

Matrix AdditiveGprModel::components(const Matrix& ystar) const {
  if (ystar.cols() != ytrain_.cols()) {
    throw ShapeError("gpr components: input has " + std::to_string(ystar.cols()) +
                     " features, model has " + std::to_string(ytrain_.cols()));
  }
  const double c = inv_two_l2(length_scale_);
  Matrix out(ystar.rows(), ystar.cols());
  for (Eigen::Index n = 0; n < ystar.rows(); ++n) {
    for (Eigen::Index j = 0; j < ystar.cols(); ++j) {
      const double u = ystar(n, j);
      Accum acc = 0.0L;
      for (Eigen::Index m = 0; m < ytrain_.rows(); ++m) {
        acc += static_cast<Accum>(alpha_[m]) * se(u - ytrain_(m, j), c);
      }
      out(n, j) = static_cast<double>(acc);
    }
  }
  return out;
}

AdditiveGprModel gpr_fit(const Matrix& y, const Vector& targets, double length_scale,
                         double noise) {
  check_length_scale(length_scale);
  if (!(noise > 0.0) || !std::isfinite(noise)) {
    throw InvalidHyperparameter("gpr: noise variance must be positive and finite");
  }
  if (y.rows() < 1) throw ShapeError("gpr_fit: need at least one training row");
  if (targets.size() != y.rows()) {
    throw ShapeError("gpr_fit: " + std::to_string(targets.size()) + " targets for " +
                     std::to_string(y.rows()) + " training rows");
  }

  const double f0 = targets.mean();
  const Vector centred = targets.array() - f0;
  const Eigen::MatrixXd k = gram_matrix(y, length_scale);

  double jitter = noise;
  while (true) {
    Eigen::MatrixXd a = k;
    a.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() == Eigen::Success) {
      Vector alpha = llt.solve(centred);
      if (alpha.allFinite()) {
        return AdditiveGprModel(y, std::move(alpha), length_scale, noise, jitter, f0);
      }
    }
    if (jitter * 10.0 > kMaxJitter * (1.0 + 1e-12)) break;
    jitter *= 10.0;
  }
  std::ostringstream msg;
  msg << "gpr_fit: Gram matrix not positive definite even with jitter " << jitter;
  throw IllConditionedGram(jitter, msg.str());
}

}  // namespace hdmr
