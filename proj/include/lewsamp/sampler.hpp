#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lewsamp/lewis.hpp"
#include "lewsamp/loss.hpp"
#include "lewsamp/types.hpp"

namespace lewsamp {

// A row-sampling plan: p_i >= 0 with sum_i p_i = draws. Rows are drawn
// i.i.d. with probability p_i / draws per draw.
struct sampling_plan {
  weight_vector p;
  std::size_t draws = 0;   // N
  double epsilon = 0.0;    // accuracy the plan was built for (0 if forced)
  double coef_abs = 0.0;   // a of the phi the plan targets (0 if forced)
  double bound_b = 0.0;    // B of the phi family (0 if forced)
  double constant = 0.0;   // oversampling constant C (0 if forced)
};

// Floor-guaranteed plan: p_i = w_i * N / S with N chosen as the smallest count
// satisfying N >= C (aB/eps)^2 * S * log N, so every row meets the floor
// p_i >= C (aB/eps)^2 * w_i * log N. S = sum of weights; requires S > 0
// (degenerate_plan otherwise), eps in (0,1), C > 0, B >= 1.
sampling_plan make_plan(const lewis_result& lw, phi_params phi, double bound_b,
                        double epsilon, double constant = 4.0);

// Proportional plan with a caller-chosen draw count; no floor guarantee.
sampling_plan make_plan_forced(const weight_vector& w, std::size_t draws);

// Uniform plan p_i = draws / n.
sampling_plan uniform_plan(std::size_t n, std::size_t draws);

// Plan for the weighted l_p estimator: per-row floor f(p, d, eps) * w_i with
//   p = 1        : f = (C / eps^2) log(d / eps)
//   1 < p <= 2   : f = (C / eps^2) log(d / eps) log^2 log(d / eps)
//   p > 2        : f = (C / eps^2) d^(p/2) log^2(d) log(d / eps)
// and N = ceil(f * S), probabilities proportional to the weights.
sampling_plan make_plan_lp(const lewis_result& lw, double p_exp, index_t dim,
                           double epsilon, double constant = 4.0);

// Result of drawing `draws` rows i.i.d. from a plan. `rows` holds the drawn
// rows (rescaled by 1/p_i for the sum estimator, unscaled for the weighted
// estimator); `source_indices` the originating row per draw; `row_weights`
// is empty for the rescaled form and holds 1/p_i per draw otherwise.
struct sampled_matrix {
  dense_matrix rows;
  std::vector<index_t> source_indices;
  weight_vector row_weights;
};

// Draw k of the index stream for `seed` uses the substream derive_seed(seed,
// k), so a longer run of draws extends a shorter one with the same prefix.
std::vector<index_t> draw_indices(const sampling_plan& plan,
                                  std::uint64_t seed);

// Sum estimator: row k is A_{i_k} / p_{i_k}; E[phi_sum(f, A~ x)] equals
// phi_sum(f, A x) for every x and 1-homogeneous phi.
sampled_matrix sample_rows(const dense_matrix& a, const sampling_plan& plan,
                           std::uint64_t seed);

// Weighted estimator: row k is A_{i_k} unscaled with weight 1/p_{i_k};
// sum_k w_k phi(<A~_k, x>) is unbiased for sum_i phi(<A_i, x>).
sampled_matrix sample_rows_weighted(const dense_matrix& a,
                                    const sampling_plan& plan,
                                    std::uint64_t seed);

// sum_k w_k * phi(y_k) for an arbitrary scalar loss phi.
template <class F>
double weighted_loss_eval(F&& phi, const weight_vector& w, const vec& y) {
  double s = 0.0;
  for (index_t k = 0; k < y.size(); ++k) s += w(k) * phi(y(k));
  return s;
}

// End-to-end quantile-loss sampler: l_1 Lewis weights of A, plan for
// phi = rho_as_phi(tau) with B = 1/tau at accuracy eps, then rescaled rows.
sampled_matrix quantile_sample(const dense_matrix& a, quantile_params tau,
                               double epsilon, std::uint64_t seed,
                               double constant = 4.0);

}  // namespace lewsamp
