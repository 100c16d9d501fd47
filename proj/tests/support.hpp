#pragma once

#include <random>

#include "oldroyd/oldroyd_system.hpp"

namespace test_support {

inline oldroyd::RealLattice random_lattice(const oldroyd::Grid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  oldroyd::RealLattice a(static_cast<Eigen::Index>(g.physical_size()));
  for (auto& v : a) v = normal(rng);
  return a;
}

/// Divergence-free, dealiased random state with O(amplitude) L^2 norms.
inline oldroyd::State random_state(const oldroyd::Grid& g, std::uint64_t seed,
                                   double amplitude = 1.0, double cutoff = 3.0) {
  oldroyd::SpectrumProfile p;
  p.cutoff_k = cutoff;
  p.target_l2_norm = amplitude;
  p.seed = seed;
  return oldroyd::make_initial_state(g, p, p);
}

inline double max_rel_diff(const Eigen::ArrayXcd& a, const Eigen::ArrayXcd& b) {
  const double scale = std::max(a.abs().maxCoeff(), b.abs().maxCoeff());
  return scale > 0.0 ? (a - b).abs().maxCoeff() / scale : 0.0;
}

inline double max_rel_diff(const oldroyd::State& a, const oldroyd::State& b) {
  double scale = 0.0, diff = 0.0;
  for (int i = 0; i < 3; ++i) {
    scale = std::max({scale, a.u[i].coeffs.abs().maxCoeff(), b.u[i].coeffs.abs().maxCoeff()});
    diff = std::max(diff, (a.u[i].coeffs - b.u[i].coeffs).abs().maxCoeff());
  }
  for (int m = 0; m < 9; ++m) {
    scale = std::max({scale, a.f[m].coeffs.abs().maxCoeff(), b.f[m].coeffs.abs().maxCoeff()});
    diff = std::max(diff, (a.f[m].coeffs - b.f[m].coeffs).abs().maxCoeff());
  }
  return scale > 0.0 ? diff / scale : 0.0;
}

}  // namespace test_support
