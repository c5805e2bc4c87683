#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace lewsamp {

// splitmix64 step: advances `state` and returns one well-mixed 64-bit word.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stable derivation of an independent substream seed from (seed, stream).
// Used everywhere a component needs its own reproducible randomness so that
// streams never alias across modules, retries, or draw indices.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  std::uint64_t z = splitmix64_next(s);
  return z ^ splitmix64_next(s);
}

// Maps a 64-bit word to a double in [0, 1).
inline double to_unit_double(std::uint64_t x) {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

// Deterministic random generator: std::mt19937_64 engine (fully pinned by the
// standard) with hand-written output transforms so results are bit-identical
// across platforms and library versions.
class rng {
 public:
  explicit rng(std::uint64_t seed) : seed_(seed), eng_(seed) {}

  // Independent substream keyed by `stream`; derived from the original seed.
  rng derive(std::uint64_t stream) const { return rng(derive_seed(seed_, stream)); }

  std::uint64_t seed() const { return seed_; }

  double uniform() { return to_unit_double(eng_()); }

  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(
        (static_cast<unsigned __int128>(eng_()) * n) >> 64);
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    const double u2 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  // Standard Laplace (location 0, scale 1) via inverse CDF.
  double laplace() {
    const double t = uniform();
    if (t < 0.5) return std::log(std::max(2.0 * t, 1e-300));
    return -std::log(std::max(2.0 * (1.0 - t), 1e-300));
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace lewsamp
