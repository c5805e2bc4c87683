#include "lewsamp/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "lewsamp/errors.hpp"

namespace lewsamp {

qr_factors thin_qr(const dense_matrix& a) {
  const index_t n = a.rows();
  const index_t d = a.cols();
  if (n == 0 || d == 0) throw std::invalid_argument("thin_qr: empty matrix");
  if (n < d) throw rank_deficient("thin_qr: fewer rows than columns");

  Eigen::HouseholderQR<dense_matrix> qr(a);
  dense_matrix r = qr.matrixQR()
                       .topRows(d)
                       .template triangularView<Eigen::Upper>();
  const double rmax = r.diagonal().cwiseAbs().maxCoeff();
  if (!(rmax > 0.0) || !std::isfinite(rmax))
    throw rank_deficient("thin_qr: zero or non-finite matrix");
  for (index_t j = 0; j < d; ++j) {
    if (std::abs(r(j, j)) <= 1e-12 * rmax)
      throw rank_deficient("thin_qr: column " + std::to_string(j) +
                           " numerically dependent");
  }

  dense_matrix q = qr.householderQ() * dense_matrix::Identity(n, d);
  // Fix signs so the diagonal of R is nonnegative; makes the factorization
  // unique and keeps outputs reproducible.
  for (index_t j = 0; j < d; ++j) {
    if (r(j, j) < 0.0) {
      r.row(j) *= -1.0;
      q.col(j) *= -1.0;
    }
  }
  return {std::move(q), std::move(r)};
}

weight_vector leverage_scores(const dense_matrix& a) {
  if (a.rows() == 0 || a.cols() == 0)
    throw std::invalid_argument("leverage_scores: empty matrix");
  if (!(a.cwiseAbs().maxCoeff() > 0.0))
    throw std::invalid_argument("leverage_scores: zero matrix");

  Eigen::BDCSVD<dense_matrix> svd(a, Eigen::ComputeThinU);
  const vec& sv = svd.singularValues();
  const double cutoff = pinv_rel_tol * sv(0);
  index_t rank = 0;
  while (rank < sv.size() && sv(rank) > cutoff) ++rank;

  const auto u = svd.matrixU().leftCols(rank);
  weight_vector tau(a.rows());
  for (index_t i = 0; i < a.rows(); ++i)
    tau(i) = std::min(u.row(i).squaredNorm(), 1.0);
  return tau;
}

dense_matrix psd_pinv(const dense_matrix& g) {
  const index_t d = g.rows();
  if (d == 0 || g.cols() != d)
    throw std::invalid_argument("psd_pinv: matrix must be square");
  const dense_matrix sym = 0.5 * (g + g.transpose());
  Eigen::SelfAdjointEigenSolver<dense_matrix> es(sym);
  if (es.info() != Eigen::Success)
    throw singular_gram("psd_pinv: eigendecomposition failed");
  const vec& lam = es.eigenvalues();
  const double lmax = lam(d - 1);
  if (!(lmax > 0.0) || !std::isfinite(lmax))
    throw singular_gram("psd_pinv: no positive eigenvalue");
  const double cutoff = pinv_rel_tol * lmax;
  vec inv = vec::Zero(d);
  for (index_t i = 0; i < d; ++i)
    if (lam(i) > cutoff) inv(i) = 1.0 / lam(i);
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

vec gram_solve(const dense_matrix& a, const weight_vector& w, const vec& v) {
  if (w.size() != a.rows())
    throw dimension_mismatch("gram_solve: weight length != row count");
  if (v.size() != a.cols())
    throw dimension_mismatch("gram_solve: rhs length != column count");
  if (w.size() > 0 && w.minCoeff() < 0.0)
    throw std::invalid_argument("gram_solve: negative weight");
  const dense_matrix g = a.transpose() * w.asDiagonal() * a;
  return psd_pinv(g) * v;
}

}  // namespace lewsamp
