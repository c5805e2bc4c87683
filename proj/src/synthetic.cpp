#include "lewsamp/synthetic.hpp"

#include <cmath>
#include <string>

#include "lewsamp/errors.hpp"
#include "lewsamp/rng.hpp"

namespace lewsamp {

synthetic_data gen_synthetic(const synthetic_spec& spec) {
  if (spec.n < 1) throw invalid_spec("gen_synthetic: n must be >= 1");
  if (spec.d < 1) throw invalid_spec("gen_synthetic: d must be >= 1");
  if (!(spec.q > 1.0 && spec.q <= 2.0))
    throw invalid_spec("gen_synthetic: q must lie in (1, 2]");
  if (!(spec.noise_ratio >= 0.0))
    throw invalid_spec("gen_synthetic: negative noise ratio");
  if (!(spec.outlier_prob >= 0.0 && spec.outlier_prob <= 1.0))
    throw invalid_spec("gen_synthetic: outlier probability outside [0, 1]");
  if (static_cast<std::size_t>(spec.d) > spec.n)
    throw invalid_spec("gen_synthetic: more coordinates than rows");

  const std::size_t n = spec.n;
  const index_t d = spec.d;

  std::vector<std::size_t> counts(static_cast<std::size_t>(d));
  if (d == 1) {
    counts[0] = n;
  } else {
    const double c1 = static_cast<double>(n) * (spec.q - 1.0) /
                      (std::pow(spec.q, static_cast<double>(d)) - 1.0);
    std::size_t partial = 0;
    for (index_t j = 0; j + 1 < d; ++j) {
      const double cj = c1 * std::pow(spec.q, static_cast<double>(j));
      const auto rounded = static_cast<std::size_t>(std::llround(cj));
      if (rounded < 1)
        throw invalid_spec("gen_synthetic: block " + std::to_string(j + 1) +
                           " rounds to zero rows; lower q or d");
      counts[static_cast<std::size_t>(j)] = rounded;
      partial += rounded;
    }
    if (partial + 1 > n)
      throw invalid_spec("gen_synthetic: rounding leaves no rows for the last block");
    counts[static_cast<std::size_t>(d - 1)] = n - partial;
  }

  synthetic_data out;
  out.multiplicities = counts;
  out.a = dense_matrix::Zero(static_cast<index_t>(n), d);
  {
    index_t row = 0;
    for (index_t j = 0; j < d; ++j)
      for (std::size_t k = 0; k < counts[static_cast<std::size_t>(j)]; ++k)
        out.a(row++, j) = 1.0;
  }

  rng master(spec.seed);
  rng coef_rng = master.derive(1);
  rng noise_rng = master.derive(2);
  rng outlier_rng = master.derive(3);

  out.x_star.resize(d);
  for (index_t j = 0; j < d; ++j) out.x_star(j) = coef_rng.normal();

  const vec b_star = out.a * out.x_star;

  vec nu(static_cast<index_t>(n));
  for (index_t i = 0; i < static_cast<index_t>(n); ++i)
    nu(i) = noise_rng.laplace();
  const double nu_l1 = nu.lpNorm<1>();
  const double b_l1 = b_star.lpNorm<1>();
  if (nu_l1 > 0.0 && b_l1 > 0.0)
    nu *= spec.noise_ratio * b_l1 / nu_l1;

  out.b.resize(static_cast<index_t>(n));
  for (index_t i = 0; i < static_cast<index_t>(n); ++i) {
    const bool outlier = outlier_rng.uniform() < spec.outlier_prob;
    out.b(i) = outlier ? spec.outlier_scale * nu(i) : b_star(i) + nu(i);
  }
  return out;
}

}  // namespace lewsamp
