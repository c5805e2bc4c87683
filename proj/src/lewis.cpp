#include "lewsamp/lewis.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "lewsamp/errors.hpp"
#include "lewsamp/graph.hpp"
#include "lewsamp/linalg.hpp"

namespace lewsamp {

namespace {

// Guard against weights collapsing to exact zero, which would make the
// scaling diag(w^(1-2/p)) ill-defined for p < 2.
constexpr double weight_floor = 1e-300;

}  // namespace

lewis_result lewis_weights(const dense_matrix& a, double p, double tol,
                           std::size_t max_iter) {
  if (!(p >= 1.0 && p < 4.0))
    throw std::invalid_argument("lewis_weights: p must lie in [1, 4)");
  if (!(tol > 0.0)) throw std::invalid_argument("lewis_weights: tol <= 0");
  const index_t n = a.rows();
  const index_t d = a.cols();
  if (n == 0 || d == 0)
    throw std::invalid_argument("lewis_weights: empty matrix");

  std::vector<index_t> active;
  active.reserve(n);
  for (index_t i = 0; i < n; ++i)
    if (a.row(i).squaredNorm() > 0.0) active.push_back(i);
  if (active.empty())
    throw std::invalid_argument("lewis_weights: all rows are zero");

  dense_matrix rows(static_cast<index_t>(active.size()), d);
  for (std::size_t k = 0; k < active.size(); ++k)
    rows.row(static_cast<index_t>(k)) = a.row(active[k]);

  const index_t na = rows.rows();
  const double expo = 1.0 - 2.0 / p;
  weight_vector w = weight_vector::Constant(na, static_cast<double>(d) / n);

  lewis_result out;
  out.p = p;
  bool converged = false;
  for (std::size_t iter = 1; iter <= max_iter; ++iter) {
    weight_vector scale(na);
    for (index_t i = 0; i < na; ++i) scale(i) = std::pow(w(i), expo);

    const dense_matrix gram = rows.transpose() * scale.asDiagonal() * rows;
    const dense_matrix ginv = psd_pinv(gram);
    // q_i = A_i^T G^+ A_i, evaluated for all rows at once.
    const weight_vector q =
        ((rows * ginv).cwiseProduct(rows)).rowwise().sum();

    double defect = 0.0;
    for (index_t i = 0; i < na; ++i) {
      const double t = scale(i) * q(i);  // current leverage of the scaled row
      defect = std::max(defect, std::abs(t - w(i)) / std::max(w(i), 1e-30));
    }
    out.iterations = iter;
    out.residual = defect;
    if (defect <= tol) {
      converged = true;
      break;
    }
    for (index_t i = 0; i < na; ++i)
      w(i) = std::max(std::pow(std::max(q(i), 0.0), p / 2.0), weight_floor);
  }
  if (!converged)
    throw no_convergence("lewis_weights: defect " +
                         std::to_string(out.residual) + " after " +
                         std::to_string(max_iter) + " iterations");

  out.weights = weight_vector::Zero(n);
  for (std::size_t k = 0; k < active.size(); ++k)
    out.weights(active[k]) = w(static_cast<index_t>(k));
  return out;
}

double verify_lewis(const dense_matrix& a, double p, const weight_vector& w) {
  if (!(p >= 1.0 && p < 4.0))
    throw std::invalid_argument("verify_lewis: p must lie in [1, 4)");
  if (w.size() != a.rows())
    throw dimension_mismatch("verify_lewis: weight length != row count");

  const double expo = 0.5 - 1.0 / p;
  std::vector<index_t> active;
  for (index_t i = 0; i < a.rows(); ++i) {
    const bool zero_row = a.row(i).squaredNorm() == 0.0;
    if (zero_row) {
      if (w(i) != 0.0)
        throw std::invalid_argument("verify_lewis: zero row with weight != 0");
      continue;
    }
    if (!(w(i) > 0.0))
      throw std::invalid_argument("verify_lewis: nonpositive weight on row " +
                                  std::to_string(i));
    active.push_back(i);
  }
  if (active.empty())
    throw std::invalid_argument("verify_lewis: all rows are zero");

  dense_matrix scaled(static_cast<index_t>(active.size()), a.cols());
  for (std::size_t k = 0; k < active.size(); ++k)
    scaled.row(static_cast<index_t>(k)) =
        std::pow(w(active[k]), expo) * a.row(active[k]);

  const weight_vector tau = leverage_scores(scaled);
  double defect = 0.0;
  for (std::size_t k = 0; k < active.size(); ++k) {
    const double wi = w(active[k]);
    defect =
        std::max(defect, std::abs(tau(static_cast<index_t>(k)) - wi) / wi);
  }
  return defect;
}

lewis_result lewis_weights_graph(const weighted_digraph& g, double p,
                                 double tol, std::size_t max_iter) {
  return lewis_weights(incidence(g), p, tol, max_iter);
}

}  // namespace lewsamp
