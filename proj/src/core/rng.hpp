#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

// Deterministic sampling helpers. std::mt19937_64 output is pinned by the
// standard; the standard <random> distributions are not, so every transform
// used for reproducible artifacts lives here.

namespace evrisk {

using Rng = std::mt19937_64;

inline double rng_uniform(Rng& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

inline double rng_uniform(Rng& g, double lo, double hi) {
  return lo + (hi - lo) * rng_uniform(g);
}

inline bool rng_bernoulli(Rng& g, double p) { return rng_uniform(g) < p; }

// Box-Muller; consumes exactly two engine draws per call.
inline double rng_normal(Rng& g) {
  double u1 = rng_uniform(g);
  double u2 = rng_uniform(g);
  if (u1 < 1e-300) u1 = 1e-300;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

inline double rng_normal(Rng& g, double mean, double sd) { return mean + sd * rng_normal(g); }

// Integer in [0, n) via the multiply-shift reduction.
inline std::uint64_t rng_below(Rng& g, std::uint64_t n) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(g()) * n) >> 64);
}

// Knuth's product method, split for large means so the inner loop stays short.
inline int rng_poisson(Rng& g, double lambda) {
  int count = 0;
  while (lambda > 30.0) {
    double l = std::exp(-30.0);
    double p = 1.0;
    int k = 0;
    do {
      ++k;
      p *= rng_uniform(g);
    } while (p > l);
    count += k - 1;
    lambda -= 30.0;
  }
  double l = std::exp(-lambda);
  double p = 1.0;
  int k = 0;
  do {
    ++k;
    p *= rng_uniform(g);
  } while (p > l);
  return count + k - 1;
}

template <class T>
void rng_shuffle(std::vector<T>& v, Rng& g) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng_below(g, i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace evrisk
