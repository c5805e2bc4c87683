#pragma once

#include <cstddef>

#include "lewsamp/types.hpp"

namespace lewsamp {

struct weighted_digraph;

// Result of the l_p Lewis weight computation. `weights` has one entry per
// row; zero rows receive weight 0. `residual` is the largest relative
// fixed-point defect measured at the returned weights and `iterations` the
// number of fixed-point sweeps performed.
struct lewis_result {
  double p = 0.0;
  weight_vector weights;
  double residual = 0.0;
  std::size_t iterations = 0;
};

// l_p Lewis weights of A for 1 <= p < 4 via the contractive fixed-point
// iteration w_i <- (A_i^T (A^T W^(1-2/p) A)^+ A_i)^(p/2), initialized at
// w_i = d/n. Stops when the largest relative defect |t_i - w_i| / w_i drops
// to `tol`; throws no_convergence after `max_iter` sweeps. For p = 2 this
// reproduces the leverage scores. Works for rank-deficient A (all inner
// solves are pseudo-inverse based); the weights then sum to rank(A).
lewis_result lewis_weights(const dense_matrix& a, double p, double tol = 1e-8,
                           std::size_t max_iter = 100);

// Independent fixed-point check: scales rows explicitly by w_i^(1/2 - 1/p),
// recomputes leverage scores of the scaled matrix through the SVD path, and
// returns the largest relative defect max_i |tau_i - w_i| / w_i. Requires
// w > 0 on nonzero rows; zero rows must carry weight 0 and are skipped.
double verify_lewis(const dense_matrix& a, double p, const weight_vector& w);

// Lewis weights of the signed edge-vertex incidence matrix of g; one weight
// per edge, in input edge order.
lewis_result lewis_weights_graph(const weighted_digraph& g, double p,
                                 double tol = 1e-8, std::size_t max_iter = 100);

}  // namespace lewsamp
