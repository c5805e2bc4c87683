#include "lewsamp/loss.hpp"

#include <stdexcept>

#include "lewsamp/errors.hpp"

namespace lewsamp {

quantile_params::quantile_params(double t) : tau(t) {
  if (!(t > 0.0 && t <= 1.0))
    throw std::invalid_argument("quantile_params: tau must lie in (0, 1]");
}

phi_params::phi_params(double a, double b) : coef_abs(a), coef_lin(b) {
  if (!(b >= 0.0 && b <= a))
    throw std::invalid_argument("phi_params: need 0 <= b <= a");
}

double rho_sum(quantile_params p, const vec& y) {
  double s = 0.0;
  for (index_t i = 0; i < y.size(); ++i) s += rho(p, y(i));
  return s;
}

double h_loss(double tau_h, double t) {
  if (!(tau_h > 0.0 && tau_h < 1.0))
    throw std::invalid_argument("h_loss: tau_h must lie in (0, 1)");
  return t >= 0.0 ? tau_h * t : (tau_h - 1.0) * t;
}

double phi_sum(phi_params f, const vec& y) {
  double s = 0.0;
  for (index_t i = 0; i < y.size(); ++i) s += phi_eval(f, y(i));
  return s;
}

vec subgradient(quantile_params p, const vec& row, double b_i, const vec& x,
                double scale) {
  if (row.size() != x.size())
    throw dimension_mismatch("subgradient: row and point dimensions differ");
  const double r = row.dot(x) - b_i;
  return (scale * rho_slope(p, r)) * row;
}

std::pair<double, double> dual_norm_bound(const dense_matrix& a, const vec& y,
                                          quantile_params p) {
  if (a.rows() != y.size())
    throw dimension_mismatch("dual_norm_bound: row count != residual length");
  const double lhs = (a.transpose() * y).norm();
  double max_row = 0.0;
  for (index_t i = 0; i < a.rows(); ++i)
    max_row = std::max(max_row, a.row(i).norm());
  const double rhs = (1.0 / p.tau) * rho_sum(p, y) * max_row;
  return {lhs, rhs};
}

}  // namespace lewsamp
