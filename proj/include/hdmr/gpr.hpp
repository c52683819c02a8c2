#pragma once

#include <span>
#include <vector>

#include "hdmr/types.hpp"

namespace hdmr {

inline constexpr double kDefaultNoise = 1e-6;
/// Jitter escalation stops once the diagonal increment would exceed this.
inline constexpr double kMaxJitter = 1e-2;

/// exp(-(a - b)^2 / (2 l^2)).
double kernel_1d(double a, double b, double length_scale);

/// Sum of one-dimensional squared-exponential kernels over all features.
double kernel_additive(std::span<const double> ya, std::span<const double> yb,
                       double length_scale);

/// Symmetric M x M Gram matrix of the additive kernel. The upper triangle is
/// computed and mirrored, so symmetry is exact.
Eigen::MatrixXd gram_matrix(const Matrix& y, double length_scale);

/// First-order additive GP regression: zero-mean GP on centred targets with
/// kernel sum_i k(y_i, y'_i). Only the posterior mean is kept.
///
/// The mean splits exactly into one function per feature,
///   mu(y) = f0 + sum_j f_j(y_j),  f_j(u) = sum_m alpha_m k(u, Y_mj),
/// and these f_j are the activation functions of the hidden neurons.
class AdditiveGprModel {
 public:
  AdditiveGprModel() = default;
  /// Assembles a model from stored parts (deserialization); no solve.
  AdditiveGprModel(Matrix ytrain, Vector alpha, double length_scale, double noise,
                   double noise_used, double target_offset);

  const Matrix& ytrain() const noexcept { return ytrain_; }
  const Vector& alpha() const noexcept { return alpha_; }
  double length_scale() const noexcept { return length_scale_; }
  /// Requested noise variance.
  double noise() const noexcept { return noise_; }
  /// Diagonal increment actually used by the factorization.
  double noise_used() const noexcept { return noise_used_; }
  bool jitter_escalated() const noexcept { return noise_used_ != noise_; }
  double target_offset() const noexcept { return target_offset_; }

  Eigen::Index train_size() const noexcept { return ytrain_.rows(); }
  Eigen::Index feature_count() const noexcept { return ytrain_.cols(); }

  /// Posterior mean, one value per row of `ystar`.
  Vector predict(const Matrix& ystar) const;

  /// f_j evaluated at each value of `grid`.
  Vector component(Eigen::Index feature, std::span<const double> grid) const;

  /// n x F matrix with entry (n, j) = f_j(ystar(n, j)).
  Matrix components(const Matrix& ystar) const;

 private:
  Matrix ytrain_;
  Vector alpha_;
  double length_scale_ = 1.0;
  double noise_ = kDefaultNoise;
  double noise_used_ = kDefaultNoise;
  double target_offset_ = 0.0;
};

/// Centres the targets on their mean and solves (K + s I) alpha = t - f0 by
/// Cholesky, starting at s = noise and multiplying by 10 on failure while
/// s <= kMaxJitter.
AdditiveGprModel gpr_fit(const Matrix& y, const Vector& targets, double length_scale,
                         double noise = kDefaultNoise);

inline Vector gpr_predict(const AdditiveGprModel& model, const Matrix& ystar) {
  return model.predict(ystar);
}

inline Vector gpr_component(const AdditiveGprModel& model, Eigen::Index feature,
                            std::span<const double> grid) {
  return model.component(feature, grid);
}

}  // namespace hdmr
