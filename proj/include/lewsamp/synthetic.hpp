#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lewsamp/types.hpp"

namespace lewsamp {

// Heavy-tailed benchmark family: rows of A are standard basis vectors e_j
// with block multiplicities growing geometrically by factor q, so early
// coordinates are observed rarely and uniform subsampling misses them.
struct synthetic_spec {
  std::size_t n = 0;
  index_t d = 0;
  double q = 1.5;               // geometric growth, in (1, 2]
  std::uint64_t seed = 0;
  double noise_ratio = 0.2;     // ||nu||_1 / ||b*||_1 after rescaling
  double outlier_prob = 0.001;  // chance a response is replaced outright
  double outlier_scale = 500.0; // replacement value is outlier_scale * nu_i
};

struct synthetic_data {
  dense_matrix a;
  vec b;
  vec x_star;  // ground-truth coefficients (b* = A x_star before noise)
  std::vector<std::size_t> multiplicities;
};

// Block j holds round(c_1 q^(j-1)) rows of e_j (the last block absorbs the
// rounding remainder); x* is i.i.d. standard normal; nu is i.i.d. Laplace
// rescaled to noise_ratio; each b_i is outlier_scale * nu_i with probability
// outlier_prob and b*_i + nu_i otherwise. Throws invalid_spec when some
// block would round to fewer than one row.
synthetic_data gen_synthetic(const synthetic_spec& spec);

}  // namespace lewsamp
