#pragma once

#include <cmath>
#include <utility>

#include "lewsamp/types.hpp"

namespace lewsamp {

// Asymmetric quantile-type scaling parameter tau in (0, 1].
struct quantile_params {
  double tau;
  explicit quantile_params(double t);
};

// Balanced absolute-value loss phi(t) = a|t| + b t with 0 <= b <= a.
struct phi_params {
  double coef_abs;  // a
  double coef_lin;  // b
  phi_params(double a, double b);
};

// rho_tau(t): t for t >= 0, -tau * t for t < 0.
inline double rho(quantile_params p, double t) {
  return t >= 0.0 ? t : -p.tau * t;
}

double rho_sum(quantile_params p, const vec& y);

// Pinball loss h(t) = tau_h * t for t >= 0, (tau_h - 1) * t otherwise,
// for tau_h in (0, 1). Satisfies h(t) = tau_h * rho(t) with
// tau = (1 - tau_h) / tau_h.
double h_loss(double tau_h, double t);

// rho_tau written as phi with a = (1 + tau) / 2, b = (1 - tau) / 2.
inline phi_params rho_as_phi(quantile_params p) {
  return phi_params{(1.0 + p.tau) / 2.0, (1.0 - p.tau) / 2.0};
}

inline double phi_eval(phi_params f, double t) {
  return f.coef_abs * std::abs(t) + f.coef_lin * t;
}

double phi_sum(phi_params f, const vec& y);

// Smallest B with ||y||_1 <= B * rho_sum(tau, y) for all y: B = 1 / tau.
inline double bound_b(quantile_params p) { return 1.0 / p.tau; }

// One-sided derivative coefficient of rho at residual r (0 at the kink).
inline double rho_slope(quantile_params p, double r) {
  if (r > 0.0) return 1.0;
  if (r < 0.0) return -p.tau;
  return 0.0;
}

// Subgradient of x -> scale * rho(<row, x> - b_i) at x.
vec subgradient(quantile_params p, const vec& row, double b_i, const vec& x,
                double scale = 1.0);

// Left and right side of  ||A^T y||_2 <= (1/tau) * rho_sum(tau, y) * max_i ||A_i||_2.
std::pair<double, double> dual_norm_bound(const dense_matrix& a, const vec& y,
                                          quantile_params p);

}  // namespace lewsamp
