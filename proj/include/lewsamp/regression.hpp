#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>

#include "lewsamp/linalg.hpp"
#include "lewsamp/loss.hpp"
#include "lewsamp/types.hpp"

namespace lewsamp {

// Instance of  min_x rho_sum(tau, A x - b).
struct quantile_problem {
  dense_matrix a;
  vec b;
  quantile_params tau;
};

// Warm start in the preconditioned coordinates: x0 = Q^T b~, the least-squares
// solution of min ||Q x - b~||_2.
vec init_point(const qr_factors& f, const vec& b_tilde);

struct subgradient_options {
  std::uint64_t max_steps = 1'000'000;  // hard cap on stochastic steps
  std::uint64_t steps_per_row = 50;     // budget = min(steps_per_row * N, max_steps)
  double target_gap = 1e-3;             // relative objective gap aimed for
  double plateau_rel = 1e-4;            // epoch-plateau exit threshold
  int plateau_window = 3;               // epochs of stagnation before exit
  double eta = 0.0;                     // step size; 0 derives D / (G sqrt(T))
  std::uint64_t seed = 0;
  bool throw_on_stall = false;          // no_convergence if nothing improved
};

struct subgradient_diag {
  std::uint64_t steps = 0;
  std::size_t epochs = 0;
  double objective = 0.0;
  double initial_objective = 0.0;
  bool improved = false;
  bool plateau_exit = false;
  bool stalled = false;  // budget spent, no improvement, no plateau
  double eta_final = 0.0;
};

// Variance-reduced accelerated stochastic subgradient descent on
// F(x) = rho_sum(tau, Q x - b~). Every epoch takes a full-gradient snapshot
// at the incumbent; inner steps combine the snapshot gradient with a
// single-row correction and negative momentum toward the snapshot. Epoch
// boundaries also evaluate a candidate that interpolates the d smallest
// residuals exactly (polyhedral objectives attain their optimum at such a
// vertex), and halve the step size after a non-improving epoch. Exits early
// once the best objective plateaus. Deterministic for fixed inputs and seed.
vec accelerated_subgradient(const dense_matrix& q, const vec& b_tilde,
                            quantile_params tau, const vec& x0,
                            const subgradient_options& opts,
                            subgradient_diag* diag = nullptr);

// Convenience overload matching the documented surface; throws
// no_convergence when the budget expires without any improvement.
vec accelerated_subgradient(const dense_matrix& q, const vec& b_tilde,
                            quantile_params tau, const vec& x0,
                            double target_gap, std::uint64_t seed);

struct solver_report {
  vec solution;
  double objective = 0.0;               // rho_sum(tau, A x* - b) on full data
  std::size_t sampled_rows = 0;         // N
  std::uint64_t sgd_steps = 0;
  double precond_initial_distance = 0.0;  // ||x0 - x_bar||_2
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
  bool degraded = false;  // inner solver stalled; solution is best effort
};

struct fit_options {
  double constant = 4.0;            // oversampling constant C
  double sample_eps_fraction = 1.0 / 3.0;  // plan accuracy = eps * fraction
  std::size_t force_draws = 0;      // nonzero overrides the plan draw count
  std::uint64_t solver_steps_per_row = 50;
  std::uint64_t solver_max_steps = 1'000'000;
  int retries = 3;                  // fresh-seed retries on a rank-deficient sample
};

// Sample-then-solve quantile regression: l_1 Lewis weights of [A b],
// rescaled row sample, thin QR preconditioning of the sampled A, warm start
// x0 = Q^T b~, accelerated subgradient to a third of the accuracy budget,
// then x* = R^{-1} x_bar. The reported objective is recomputed on the full
// data.
solver_report fit(const quantile_problem& prob, double epsilon,
                  std::uint64_t seed, const fit_options& opts = {});

// Brute-force oracle for desk-scale instances (n <= 80, d <= 4): enumerates
// all d-row interpolation candidates in lexicographic order and returns the
// first strict minimizer of the full objective. Throws too_large beyond the
// size limits and degenerate_instance if every candidate system is singular.
std::pair<vec, double> exact_small(const quantile_problem& prob);

struct reduced_solution {
  vec x;
  double objective = 0.0;
  std::uint64_t steps = 0;
  bool degraded = false;
};

// Rank-tolerant solve of min rho_sum(tau, A x - b): restricts to a maximal
// independent column subset (pivoted QR), solves there with the
// preconditioned subgradient pipeline, and reports zero on the dropped
// coordinates. Used by the experiment harness, where subsampled instances
// may lose column rank legitimately.
reduced_solution solve_reduced(const dense_matrix& a, const vec& b,
                               quantile_params tau,
                               const subgradient_options& opts);

}  // namespace lewsamp
