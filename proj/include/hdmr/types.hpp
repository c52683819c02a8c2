#pragma once

#include <Eigen/Core>

namespace hdmr {

// Sample-major storage: one row per sample, one column per coordinate.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

}  // namespace hdmr
