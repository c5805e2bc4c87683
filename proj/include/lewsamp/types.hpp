#pragma once

#include <Eigen/Dense>

namespace lewsamp {

using dense_matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using vec = Eigen::VectorXd;
using weight_vector = Eigen::VectorXd;
using index_t = Eigen::Index;

// Relative cutoff below the largest singular (or eigen) value under which a
// direction is treated as numerically null by pseudo-inverse based solves.
inline constexpr double pinv_rel_tol = 1e-12;

}  // namespace lewsamp
