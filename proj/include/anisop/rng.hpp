#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace anisop {

/// Counter-based generator (splitmix64 over seed ^ counter). Stateless draws:
/// the k-th sample for a given seed is always the same, independent of call
/// order, so every sampled diagnostic is reproducible from (seed, n).
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  double uniform(std::uint64_t k) const {
    return static_cast<double>(mix(seed_ + 0x9e3779b97f4a7c15ULL * (k + 1)) >> 11) *
           0x1.0p-53;
  }

  /// Standard normal via Box-Muller on counters (2k, 2k+1).
  double normal(std::uint64_t k) const {
    double u1 = uniform(2 * k);
    double u2 = uniform(2 * k + 1);
    u1 = u1 > 0 ? u1 : 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  /// Point uniformly distributed on the unit sphere in R^dim.
  std::vector<double> on_sphere(std::uint64_t k, int dim) const {
    std::vector<double> v(dim);
    double nrm2 = 0.0;
    for (;;) {
      for (int i = 0; i < dim; ++i) {
        v[i] = normal(k * static_cast<std::uint64_t>(dim) + i);
        nrm2 += v[i] * v[i];
      }
      if (nrm2 > 1e-300) break;
      k += 0x51ed2701;  // astronomically unlikely; retry with shifted counter
      nrm2 = 0.0;
    }
    const double inv = 1.0 / std::sqrt(nrm2);
    for (auto& x : v) x *= inv;
    return v;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  std::uint64_t seed_;
};

}  // namespace anisop
