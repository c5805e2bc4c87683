#include "lewsamp/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lewsamp/errors.hpp"
#include "lewsamp/rng.hpp"

namespace lewsamp {

namespace {

// Smallest N with N >= target * log N (and N >= 1), padded by a hair of
// relative slack so the per-row floor check survives rounding.
std::size_t solve_draw_count(double target) {
  double n = target * std::log(target + std::numbers::e);
  n = std::max(n, 1.0);
  for (int pass = 0; pass < 2; ++pass)
    n = std::max(target * std::log(n), 1.0);
  std::size_t draws = static_cast<std::size_t>(std::ceil(n));
  draws = std::max<std::size_t>(draws, 1);
  const double slack = 1.0 + 1e-9;
  for (int guard = 0; guard < 256; ++guard) {
    const double need =
        target * std::log(static_cast<double>(draws)) * slack;
    if (static_cast<double>(draws) >= need) return draws;
    draws = static_cast<std::size_t>(std::ceil(need));
  }
  throw std::logic_error("solve_draw_count: no fixed point found");
}

sampling_plan proportional_plan(const weight_vector& w, std::size_t draws) {
  const double total = w.sum();
  if (!(total > 0.0)) throw degenerate_plan("plan: weights sum to zero");
  if (w.minCoeff() < 0.0)
    throw std::invalid_argument("plan: negative weight");
  sampling_plan plan;
  plan.p = w * (static_cast<double>(draws) / total);
  plan.draws = draws;
  return plan;
}

}  // namespace

sampling_plan make_plan(const lewis_result& lw, phi_params phi, double bound_b,
                        double epsilon, double constant) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("make_plan: epsilon must lie in (0, 1)");
  if (!(constant > 0.0))
    throw std::invalid_argument("make_plan: constant must be positive");
  if (!(bound_b >= 1.0))
    throw std::invalid_argument("make_plan: bound B must be >= 1");

  const double total = lw.weights.sum();
  if (!(total > 0.0)) throw degenerate_plan("make_plan: weights sum to zero");

  const double beta =
      constant * std::pow(phi.coef_abs * bound_b / epsilon, 2.0);
  const std::size_t draws = solve_draw_count(beta * total);

  sampling_plan plan = proportional_plan(lw.weights, draws);
  plan.epsilon = epsilon;
  plan.coef_abs = phi.coef_abs;
  plan.bound_b = bound_b;
  plan.constant = constant;
  return plan;
}

sampling_plan make_plan_forced(const weight_vector& w, std::size_t draws) {
  if (draws == 0) throw std::invalid_argument("make_plan_forced: zero draws");
  return proportional_plan(w, draws);
}

sampling_plan uniform_plan(std::size_t n, std::size_t draws) {
  if (n == 0) throw std::invalid_argument("uniform_plan: empty row set");
  if (draws == 0) throw std::invalid_argument("uniform_plan: zero draws");
  sampling_plan plan;
  plan.p = weight_vector::Constant(static_cast<index_t>(n),
                                   static_cast<double>(draws) / n);
  plan.draws = draws;
  return plan;
}

sampling_plan make_plan_lp(const lewis_result& lw, double p_exp, index_t dim,
                           double epsilon, double constant) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("make_plan_lp: epsilon must lie in (0, 1)");
  if (!(constant > 0.0))
    throw std::invalid_argument("make_plan_lp: constant must be positive");
  if (!(p_exp >= 1.0))
    throw std::invalid_argument("make_plan_lp: p must be >= 1");
  if (dim < 1) throw std::invalid_argument("make_plan_lp: dim must be >= 1");

  const double total = lw.weights.sum();
  if (!(total > 0.0))
    throw degenerate_plan("make_plan_lp: weights sum to zero");

  const double d = static_cast<double>(dim);
  const double base = constant / (epsilon * epsilon);
  const double lg = std::log(d / epsilon);
  double f = 0.0;
  if (p_exp == 1.0) {
    f = base * lg;
  } else if (p_exp <= 2.0) {
    const double ll = std::log(std::max(lg, 1.0 + 1e-12));
    f = base * lg * ll * ll;
  } else {
    const double ld = std::log(std::max(d, 2.0));
    f = base * std::pow(d, p_exp / 2.0) * ld * ld * lg;
  }

  const std::size_t draws = static_cast<std::size_t>(
      std::max(std::ceil(f * total), 1.0));
  sampling_plan plan = proportional_plan(lw.weights, draws);
  plan.epsilon = epsilon;
  plan.constant = constant;
  return plan;
}

std::vector<index_t> draw_indices(const sampling_plan& plan,
                                  std::uint64_t seed) {
  const index_t n = plan.p.size();
  if (n == 0) throw degenerate_plan("draw_indices: empty plan");
  if (plan.draws == 0) throw degenerate_plan("draw_indices: zero draws");

  std::vector<double> cum(static_cast<std::size_t>(n));
  double run = 0.0;
  for (index_t i = 0; i < n; ++i) {
    run += plan.p(i);
    cum[static_cast<std::size_t>(i)] = run;
  }
  if (!(run > 0.0)) throw degenerate_plan("draw_indices: zero total mass");

  std::vector<index_t> idx(plan.draws);
  for (std::size_t k = 0; k < plan.draws; ++k) {
    const double u = to_unit_double(derive_seed(seed, k)) * run;
    const auto it = std::upper_bound(cum.begin(), cum.end(), u);
    idx[k] = std::min<index_t>(
        static_cast<index_t>(it - cum.begin()), n - 1);
  }
  return idx;
}

sampled_matrix sample_rows(const dense_matrix& a, const sampling_plan& plan,
                           std::uint64_t seed) {
  if (plan.p.size() != a.rows())
    throw dimension_mismatch("sample_rows: plan length != row count");
  sampled_matrix out;
  out.source_indices = draw_indices(plan, seed);
  out.rows.resize(static_cast<index_t>(plan.draws), a.cols());
  for (std::size_t k = 0; k < plan.draws; ++k) {
    const index_t i = out.source_indices[k];
    out.rows.row(static_cast<index_t>(k)) = a.row(i) / plan.p(i);
  }
  return out;
}

sampled_matrix sample_rows_weighted(const dense_matrix& a,
                                    const sampling_plan& plan,
                                    std::uint64_t seed) {
  if (plan.p.size() != a.rows())
    throw dimension_mismatch("sample_rows_weighted: plan length != row count");
  sampled_matrix out;
  out.source_indices = draw_indices(plan, seed);
  out.rows.resize(static_cast<index_t>(plan.draws), a.cols());
  out.row_weights.resize(static_cast<index_t>(plan.draws));
  for (std::size_t k = 0; k < plan.draws; ++k) {
    const index_t i = out.source_indices[k];
    out.rows.row(static_cast<index_t>(k)) = a.row(i);
    out.row_weights(static_cast<index_t>(k)) = 1.0 / plan.p(i);
  }
  return out;
}

sampled_matrix quantile_sample(const dense_matrix& a, quantile_params tau,
                               double epsilon, std::uint64_t seed,
                               double constant) {
  const lewis_result lw = lewis_weights(a, 1.0);
  const sampling_plan plan =
      make_plan(lw, rho_as_phi(tau), bound_b(tau), epsilon, constant);
  return sample_rows(a, plan, seed);
}

}  // namespace lewsamp
