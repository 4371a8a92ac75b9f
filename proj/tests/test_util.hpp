#pragma once

#include <random>
#include <vector>

#include "orlfb/mesh.hpp"

namespace orlfb::test {

/// Deterministic uniform values in [lo, hi].
inline std::vector<double> random_values(std::size_t n, double lo, double hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

/// Random interior values on a grid; Dirichlet data stays put.
inline ScalarField random_field(const Grid& g, double lo, double hi, std::uint64_t seed) {
  ScalarField f(g);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  for (int n = 0; n < g.num_nodes(); ++n)
    if (g.node_kind(n) == NodeKind::Interior) f[n] = dist(rng);
  return f;
}

}  // namespace orlfb::test
