// Seeded random streams. Every Monte Carlo task draws from its own stream,
// derived from the master seed by hashing the task coordinates, so results do
// not depend on scheduling order.

#ifndef SPARSEJT_RNG_HPP
#define SPARSEJT_RNG_HPP

#include "sparsejt/types.hpp"

#include <cstdint>
#include <random>

namespace sparsejt {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline Rng substream(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                     std::uint64_t c = 0) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ splitmix64(a + 1));
  h = splitmix64(h ^ splitmix64(b + 0x51));
  h = splitmix64(h ^ splitmix64(c + 0xa3));
  return Rng(h);
}

// Circularly-symmetric CN(0, 1) sample.
inline cplx complex_normal(Rng& rng) {
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  const double re = gauss(rng);
  const double im = gauss(rng);
  return {re, im};
}

inline CVec complex_normal_vector(Rng& rng, int n) {
  CVec v(n);
  for (int i = 0; i < n; ++i) v[i] = complex_normal(rng);
  return v;
}

}  // namespace sparsejt

#endif  // SPARSEJT_RNG_HPP
