#include "lewsamp/regression.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <Eigen/LU>
#include <Eigen/QR>

#include "lewsamp/errors.hpp"
#include "lewsamp/lewis.hpp"
#include "lewsamp/rng.hpp"
#include "lewsamp/sampler.hpp"

namespace lewsamp {

vec init_point(const qr_factors& f, const vec& b_tilde) {
  if (f.q.rows() != b_tilde.size())
    throw dimension_mismatch("init_point: Q rows != rhs length");
  return f.q.transpose() * b_tilde;
}

namespace {

double objective_of(const dense_matrix& q, const vec& b, quantile_params tau,
                    const vec& x) {
  return rho_sum(tau, q * x - b);
}

// Interpolates the d rows with smallest |residual| exactly. Polyhedral
// objectives attain their optimum at such a vertex, so once the iterate is
// near-optimal this candidate frequently lands on the exact minimizer.
bool vertex_candidate(const dense_matrix& q, const vec& b, const vec& resid,
                      vec& out) {
  const index_t n = q.rows();
  const index_t d = q.cols();
  if (n < d) return false;
  std::vector<index_t> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), index_t{0});
  std::nth_element(order.begin(), order.begin() + (d - 1), order.end(),
                   [&](index_t i, index_t j) {
                     const double ai = std::abs(resid(i));
                     const double aj = std::abs(resid(j));
                     if (ai != aj) return ai < aj;
                     return i < j;
                   });
  dense_matrix qs(d, d);
  vec bs(d);
  for (index_t k = 0; k < d; ++k) {
    qs.row(k) = q.row(order[static_cast<std::size_t>(k)]);
    bs(k) = b(order[static_cast<std::size_t>(k)]);
  }
  Eigen::FullPivLU<dense_matrix> lu(qs);
  if (!lu.isInvertible()) return false;
  vec x = lu.solve(bs);
  if (!x.allFinite()) return false;
  out = std::move(x);
  return true;
}

}  // namespace

vec accelerated_subgradient(const dense_matrix& q, const vec& b_tilde,
                            quantile_params tau, const vec& x0,
                            const subgradient_options& opts,
                            subgradient_diag* diag) {
  const index_t n = q.rows();
  const index_t d = q.cols();
  if (n == 0 || d == 0)
    throw std::invalid_argument("accelerated_subgradient: empty system");
  if (b_tilde.size() != n)
    throw dimension_mismatch("accelerated_subgradient: rhs length != rows");
  if (x0.size() != d)
    throw dimension_mismatch("accelerated_subgradient: start length != cols");

  subgradient_diag local;
  subgradient_diag& dg = diag ? *diag : local;
  dg = subgradient_diag{};

  vec best_x = x0;
  double best_f = objective_of(q, b_tilde, tau, x0);
  dg.initial_objective = best_f;
  const double f0 = best_f;

  const std::uint64_t budget = std::min<std::uint64_t>(
      opts.max_steps, opts.steps_per_row * static_cast<std::uint64_t>(n));

  // Below machine precision of the data's own scale there is nothing left to
  // improve; treat the warm start as final.
  const double data_scale = rho_sum(tau, vec(-b_tilde));
  if (best_f <= 1e-15 * data_scale || budget == 0) {
    dg.objective = best_f;
    dg.improved = false;
    return best_x;
  }

  double max_row2 = 0.0;
  for (index_t i = 0; i < n; ++i)
    max_row2 = std::max(max_row2, q.row(i).squaredNorm());

  // Lipschitz scale of the per-row terms and the warm-start distance bound;
  // together they give the horizon step size eta = D / (G sqrt(T)).
  const double g_lip = std::sqrt(static_cast<double>(n) * max_row2) *
                       std::max(1.0, static_cast<double>(n));
  const double dist =
      std::sqrt(static_cast<double>(d) /
                (static_cast<double>(n) * tau.tau * tau.tau)) *
      best_f;
  double eta = opts.eta > 0.0
                   ? opts.eta
                   : dist / (g_lip * std::sqrt(static_cast<double>(budget)));
  if (!(eta > 0.0) || !std::isfinite(eta)) eta = 1e-12;
  const double eta_min = eta * 1e-30;

  rng gen(opts.seed);
  vec z = best_x;
  vec w = best_x;
  vec snap(d), y(d), g(d), tail(d), mu(d);
  vec resid(n), coef(n);
  std::vector<double> hist{best_f};
  const double theta2 = 0.5;
  double prev_best = best_f;

  while (dg.steps < budget) {
    ++dg.epochs;
    snap = best_x;
    resid.noalias() = q * snap;
    resid -= b_tilde;
    for (index_t i = 0; i < n; ++i) coef(i) = rho_slope(tau, resid(i));
    mu.noalias() = q.transpose() * coef;

    vec cand;
    if (vertex_candidate(q, b_tilde, resid, cand)) {
      const double fc = objective_of(q, b_tilde, tau, cand);
      if (fc < best_f) {
        best_f = fc;
        best_x = cand;
      }
    }

    const double theta1 = 2.0 / static_cast<double>(dg.epochs + 3);
    const double theta_w = 1.0 - theta1 - theta2;

    tail.setZero();
    std::uint64_t tail_n = 0;
    const std::uint64_t m = std::min<std::uint64_t>(
        static_cast<std::uint64_t>(n), budget - dg.steps);
    for (std::uint64_t k = 0; k < m; ++k) {
      ++dg.steps;
      const index_t j =
          static_cast<index_t>(gen.index(static_cast<std::size_t>(n)));
      y = theta1 * z + theta2 * snap + theta_w * w;
      const double ry = q.row(j).dot(y) - b_tilde(j);
      const double cy = rho_slope(tau, ry);
      if (cy != coef(j)) {
        g = mu;
        g.noalias() += (static_cast<double>(n) * (cy - coef(j))) *
                       q.row(j).transpose();
      } else {
        g = mu;
      }
      z.noalias() -= eta * g;
      w = y;
      w.noalias() -= (theta1 * eta) * g;
      if (2 * k >= m) {
        tail += w;
        ++tail_n;
      }
    }

    if (tail_n > 0) {
      tail /= static_cast<double>(tail_n);
      const double ft = objective_of(q, b_tilde, tau, tail);
      if (ft < best_f) {
        best_f = ft;
        best_x = tail;
      }
    }
    const double fw = objective_of(q, b_tilde, tau, w);
    if (fw < best_f) {
      best_f = fw;
      best_x = w;
    }

    hist.push_back(best_f);
    const std::size_t win = static_cast<std::size_t>(opts.plateau_window);
    if (hist.size() > win) {
      const double before = hist[hist.size() - 1 - win];
      if (before - best_f <=
          opts.plateau_rel * std::max(best_f, 1e-300)) {
        dg.plateau_exit = true;
        break;
      }
    }

    // A fruitless epoch means the step was too long for the current
    // neighborhood: halve it and restart the momentum pair at the incumbent.
    if (best_f >= prev_best * (1.0 - 1e-12)) {
      eta = std::max(eta * 0.5, eta_min);
      z = best_x;
      w = best_x;
    }
    prev_best = best_f;
  }

  dg.objective = best_f;
  dg.eta_final = eta;
  dg.improved = best_f < f0 * (1.0 - 1e-12);
  dg.stalled = !dg.improved && !dg.plateau_exit && f0 > 0.0;
  if (dg.stalled && opts.throw_on_stall)
    throw no_convergence(
        "accelerated_subgradient: no improvement within budget");
  return best_x;
}

vec accelerated_subgradient(const dense_matrix& q, const vec& b_tilde,
                            quantile_params tau, const vec& x0,
                            double target_gap, std::uint64_t seed) {
  subgradient_options opts;
  opts.target_gap = target_gap;
  opts.plateau_rel = target_gap * 0.3;
  opts.seed = seed;
  opts.throw_on_stall = true;
  return accelerated_subgradient(q, b_tilde, tau, x0, opts, nullptr);
}

solver_report fit(const quantile_problem& prob, double epsilon,
                  std::uint64_t seed, const fit_options& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const index_t n = prob.a.rows();
  const index_t d = prob.a.cols();
  if (prob.b.size() != n)
    throw dimension_mismatch("fit: response length != row count");
  if (n < d + 1)
    throw invalid_spec("fit: need at least d + 1 rows");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("fit: epsilon must lie in (0, 1)");

  dense_matrix m(n, d + 1);
  m.leftCols(d) = prob.a;
  m.col(d) = prob.b;

  const lewis_result lw = lewis_weights(m, 1.0);
  const phi_params phi = rho_as_phi(prob.tau);
  const double bb = bound_b(prob.tau);

  for (int attempt = 0; attempt <= opts.retries; ++attempt) {
    const std::uint64_t attempt_seed =
        derive_seed(seed, static_cast<std::uint64_t>(attempt));
    const sampling_plan plan =
        opts.force_draws > 0
            ? make_plan_forced(lw.weights, opts.force_draws)
            : make_plan(lw, phi, bb, epsilon * opts.sample_eps_fraction,
                        opts.constant);
    const sampled_matrix sm = sample_rows(m, plan, attempt_seed);
    const dense_matrix a_t = sm.rows.leftCols(d);
    const vec b_t = sm.rows.col(d);

    qr_factors f;
    try {
      f = thin_qr(a_t);
    } catch (const rank_deficient&) {
      continue;
    }

    const vec x0 = init_point(f, b_t);
    subgradient_options so;
    so.max_steps = opts.solver_max_steps;
    so.steps_per_row = opts.solver_steps_per_row;
    so.target_gap = epsilon / 3.0;
    so.plateau_rel = epsilon / 10.0;
    so.seed = derive_seed(attempt_seed, 0x514e55ULL);
    subgradient_diag dgn;
    const vec x_bar =
        accelerated_subgradient(f.q, b_t, prob.tau, x0, so, &dgn);
    const vec x_star =
        f.r.template triangularView<Eigen::Upper>().solve(x_bar);

    solver_report rep;
    rep.solution = x_star;
    rep.objective = rho_sum(prob.tau, prob.a * x_star - prob.b);
    rep.sampled_rows = plan.draws;
    rep.sgd_steps = dgn.steps;
    rep.precond_initial_distance = (x0 - x_bar).norm();
    rep.seed = seed;
    rep.degraded = dgn.stalled;
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    return rep;
  }
  throw rank_deficient("fit: sampled matrix rank-deficient after retries");
}

std::pair<vec, double> exact_small(const quantile_problem& prob) {
  const index_t n = prob.a.rows();
  const index_t d = prob.a.cols();
  if (prob.b.size() != n)
    throw dimension_mismatch("exact_small: response length != row count");
  if (n > 80 || d > 4)
    throw too_large("exact_small: limits are n <= 80, d <= 4");
  if (n < d) throw invalid_spec("exact_small: need at least d rows");

  std::vector<index_t> c(static_cast<std::size_t>(d));
  std::iota(c.begin(), c.end(), index_t{0});

  bool found = false;
  vec best_x;
  double best_f = 0.0;
  dense_matrix as(d, d);
  vec bs(d);
  while (true) {
    for (index_t k = 0; k < d; ++k) {
      as.row(k) = prob.a.row(c[static_cast<std::size_t>(k)]);
      bs(k) = prob.b(c[static_cast<std::size_t>(k)]);
    }
    Eigen::FullPivLU<dense_matrix> lu(as);
    if (lu.isInvertible()) {
      const vec x = lu.solve(bs);
      if (x.allFinite()) {
        const double fx = rho_sum(prob.tau, prob.a * x - prob.b);
        if (!found || fx < best_f) {
          found = true;
          best_f = fx;
          best_x = x;
        }
      }
    }
    // advance the combination in lexicographic order
    index_t i = d - 1;
    while (i >= 0 && c[static_cast<std::size_t>(i)] == n - d + i) --i;
    if (i < 0) break;
    ++c[static_cast<std::size_t>(i)];
    for (index_t j = i + 1; j < d; ++j)
      c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
  }
  if (!found)
    throw degenerate_instance("exact_small: every candidate system singular");
  return {best_x, best_f};
}

reduced_solution solve_reduced(const dense_matrix& a, const vec& b,
                               quantile_params tau,
                               const subgradient_options& opts) {
  const index_t n = a.rows();
  const index_t d = a.cols();
  if (b.size() != n)
    throw dimension_mismatch("solve_reduced: rhs length != row count");

  reduced_solution out;
  Eigen::ColPivHouseholderQR<dense_matrix> cp(a);
  cp.setThreshold(1e-10);
  const index_t rank = cp.rank();
  const auto& piv = cp.colsPermutation().indices();

  std::vector<index_t> keep;
  keep.reserve(static_cast<std::size_t>(rank));
  for (index_t k = 0; k < rank; ++k) keep.push_back(piv(k));

  while (!keep.empty()) {
    const index_t r = static_cast<index_t>(keep.size());
    dense_matrix sub(n, r);
    for (index_t j = 0; j < r; ++j)
      sub.col(j) = a.col(keep[static_cast<std::size_t>(j)]);

    qr_factors f;
    try {
      f = thin_qr(sub);
    } catch (const rank_deficient&) {
      keep.pop_back();  // drop the least pivotal column and retry
      continue;
    }
    const vec x0 = init_point(f, b);
    subgradient_diag dgn;
    const vec x_bar = accelerated_subgradient(f.q, b, tau, x0, opts, &dgn);
    const vec x_sub =
        f.r.template triangularView<Eigen::Upper>().solve(x_bar);

    out.x = vec::Zero(d);
    for (index_t j = 0; j < r; ++j)
      out.x(keep[static_cast<std::size_t>(j)]) = x_sub(j);
    out.objective = rho_sum(tau, a * out.x - b);
    out.steps = dgn.steps;
    out.degraded = dgn.stalled;
    return out;
  }

  out.x = vec::Zero(d);
  out.objective = rho_sum(tau, -b);
  return out;
}

}  // namespace lewsamp
