#pragma once

#include <cmath>
#include <vector>

#include "oldroyd/oldroyd_system.hpp"

namespace oldroyd {

/// Frequency splitting radius g(t) = sqrt(gamma / (t + 1)).
struct SplittingSchedule {
  double gamma = 4.0;

  double radius(double t) const { return std::sqrt(gamma / (t + 1.0)); }
};

/// One row of the diagnostic time series. All norms use the Parseval scale.
struct TimeSeriesRecord {
  double time = 0.0;
  double l2_u_sq = 0.0;
  double l2_f_sq = 0.0;
  /// hm_sq[j] = ||grad^j u||^2 + ||grad^j F||^2 for j = 0..m.
  std::vector<double> hm_sq;
  double dissipation_u = 0.0;  // 2 mu ||grad u||^2
  double damping_f = 0.0;      // 2 nu ||F||^2
  double shell_mass_u = 0.0;   // mass of u on |k| <= g(t)
  double shell_mass_f = 0.0;
  double ratio_u = 0.0;        // max_{k != 0} |u(k,t)| / (|u0(k)| + 1/|k|)
  double ratio_f = 0.0;        // max_k |F(k,t)| / (|F0(k)| + |k|)
};

TimeSeriesRecord record(const State& state, const PhysParams& params,
                        const SplittingSchedule& schedule, const State& initial_state,
                        int m_order = 3);

enum class DerivativeStencil { three_point, five_point };

/// Residual of d/dt E + 2 nu ||F||^2 + 2 mu ||grad u||^2 at each interior
/// sample, with E = ||u||^2 + ||F||^2 and d/dt from finite differences on the
/// (possibly nonuniform) sample times. The three-point stencil is second
/// order; the five-point stencil is fourth order and leaves two samples at
/// each end without a residual.
std::vector<double> energy_identity_residual(
    const std::vector<TimeSeriesRecord>& records,
    DerivativeStencil stencil = DerivativeStencil::three_point);

/// Times matching energy_identity_residual's output.
std::vector<double> energy_identity_times(
    const std::vector<TimeSeriesRecord>& records,
    DerivativeStencil stencil = DerivativeStencil::three_point);

/// Largest increase between consecutive samples of sum_{j<=m} hm_sq[j],
/// divided by its initial value. Zero means monotone decay.
double hm_monotonicity_violation(const std::vector<TimeSeriesRecord>& records, int m_order);

struct Lemma41Constants {
  double c_u = 0.0;
  double c_f = 0.0;
};

/// Smallest constants C validating the pointwise spectral bounds on this run.
Lemma41Constants lemma41_constants(const std::vector<TimeSeriesRecord>& records);

/// Weights of the derivative of order `order` at x0 for arbitrary nodes
/// (Fornberg's recursion).
std::vector<double> finite_difference_weights(double x0, const std::vector<double>& nodes,
                                              int order);

}  // namespace oldroyd
