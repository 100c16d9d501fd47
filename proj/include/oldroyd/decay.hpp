#pragma once

#include <utility>
#include <vector>

#include "oldroyd/oldroyd_system.hpp"

namespace oldroyd {

/// Least-squares power law: log value = exponent * log(1 + t) + intercept.
struct DecayFit {
  double exponent = 0.0;
  double stderr_exponent = 0.0;
  double intercept = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  int n_samples = 0;
};

/// Radial modulus |v(r)| of whole-space initial data, r = |xi|.
struct RadialProfile {
  enum class Kind { flat_then_gaussian, power };

  Kind kind = Kind::flat_then_gaussian;
  /// flat_then_gaussian: amplitude 1 for r <= cutoff, exp(-((r - cutoff) / width)^2)
  /// beyond (width = 0 gives a sharp ball). power: r^s exp(-(r / cutoff)^2).
  double cutoff = 1.0;
  double width = 0.0;
  double s = 0.0;

  static RadialProfile flat(double cutoff, double width = 0.0) {
    return {Kind::flat_then_gaussian, cutoff, width, 0.0};
  }
  static RadialProfile power(double s, double cutoff) { return {Kind::power, cutoff, 0.0, s}; }

  void validate() const;
  double amplitude(double r) const;
  /// Radius beyond which the amplitude is below 1e-30 of its scale.
  double support_radius() const;
  /// Points where the amplitude is not smooth (quadrature breakpoints).
  std::vector<double> breakpoints() const;
};

/// Exact linear semigroup: u(k, t) = exp(-mu |k|^2 t) u0(k), F(k, t) = exp(-nu t) F0(k).
State linear_oracle_evolve(const State& initial, const PhysParams& params, double t);

/// 4 pi int_0^inf exp(-2 mu r^2 t) amplitude(r)^2 r^2 dr, relative tolerance 1e-10.
double quadrature_linear_energy(const RadialProfile& profile, double mu, double t);

/// Closed form of quadrature_linear_energy where one exists (power profiles and
/// the sharp flat ball); NaN otherwise.
double closed_form_linear_energy(const RadialProfile& profile, double mu, double t);

struct ShellIntegral {
  /// 4 pi int_0^g amplitude(r)^2 r^2 dr with g = sqrt(gamma / (t + 1)).
  double value = 0.0;
  /// Hausdorff-Young/Hoelder bound ||v||_{L^q}^2 |S(t)|^(1 - 2/q), 1/p + 1/q = 1.
  double bound = 0.0;
  /// -(3/2)(2/p - 1), the decay exponent of the bound.
  double bound_exponent = 0.0;
};

/// Low-frequency mass of the initial data inside the splitting ball. p in [1, 2].
ShellIntegral lemma22_shell_integral(const RadialProfile& profile, double p, double gamma,
                                     double t);

/// L^q norm of the radial profile in R^3; q = infinity is the supremum.
double profile_lq_norm(const RadialProfile& profile, double q);

/// Fits log value against log(1 + t) over samples with t in [t_lo, t_hi].
DecayFit fit_power_law(const std::vector<std::pair<double, double>>& series, double t_lo,
                       double t_hi);

struct ValidityWindow {
  double t_lo = 0.0;
  double t_hi = 0.0;
};

/// Interval where whole-space algebraic decay is resolved on the periodic box:
/// t_lo = max(transient_skip, first t with g(t) <= k_max_retained / 4),
/// t_hi = c_win / (mu k_min^2). Throws RangeError when the window is empty.
ValidityWindow validity_window(const Grid& grid, const PhysParams& params, double gamma,
                               double transient_skip = 0.0, double c_win = 0.25);

/// Energy of the lattice linear flow: sum_k exp(-2 mu |k|^2 t)|u0(k)|^2 + exp(-2 nu t)|F0(k)|^2.
double lattice_linear_energy(const State& initial, const PhysParams& params, double t,
                             int derivative_order = 0);

}  // namespace oldroyd
