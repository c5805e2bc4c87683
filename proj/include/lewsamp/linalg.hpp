#pragma once

#include "lewsamp/types.hpp"

namespace lewsamp {

// Thin QR factorization A = Q R with Q (n x d) having orthonormal columns and
// R (d x d) upper triangular with nonnegative diagonal.
struct qr_factors {
  dense_matrix q;
  dense_matrix r;
};

// Requires n >= d and numerically full column rank; throws rank_deficient
// when a diagonal of R falls below 1e-12 times the largest one.
qr_factors thin_qr(const dense_matrix& a);

// Statistical leverage scores tau_i(A) = A_i^T (A^T A)^+ A_i, computed from
// squared row norms of the thin orthonormal factor (rank-truncated SVD).
// Each score lies in [0, 1] and they sum to rank(A).
weight_vector leverage_scores(const dense_matrix& a);

// Pseudo-inverse of a symmetric positive semidefinite matrix via its
// eigendecomposition, dropping eigenvalues below pinv_rel_tol * lambda_max.
// Throws singular_gram if the matrix has no positive eigenvalue.
dense_matrix psd_pinv(const dense_matrix& g);

// Solves (A^T diag(w) A) x = v in the least-squares (pseudo-inverse) sense.
// Requires w >= 0 elementwise; throws singular_gram on a numerically zero
// Gram matrix.
vec gram_solve(const dense_matrix& a, const weight_vector& w, const vec& v);

}  // namespace lewsamp
