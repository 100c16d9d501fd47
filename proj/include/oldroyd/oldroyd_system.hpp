#pragma once

// Right-hand side of the incompressible Oldroyd system with deformation-tensor
// damping, written column-wise:
//
//   d_t u - mu Lap u + u.grad u + grad p = sum_j F_.j . grad F_.j
//   d_t F_.j + nu F_.j + u.grad F_.j     = F_.j . grad u
//   div u = 0,  div F^T = 0
//
// with (F_.j . grad u)_i = sum_k F_kj d_k u_i, i.e. the matrix product
// grad u F is read with (grad u)_ik = d_k u_i.

#include <array>
#include <utility>

#include "oldroyd/spectral.hpp"

namespace oldroyd {

struct PhysParams {
  double mu = 1.0;
  double nu = 1.0;

  void validate() const;
  bool operator==(const PhysParams&) const = default;
};

/// 3 x 3 tensor field; entry (i, j) lives at index 3 * i + j, so column j is
/// {F(0, j), F(1, j), F(2, j)}.
using TensorField = std::array<SpectralField, 9>;

constexpr int tensor_index(int i, int j) { return 3 * i + j; }

TensorField zero_tensor_field(const Grid& grid);

/// Column j of F as a vector field.
VectorField column(const TensorField& f, int j);

struct State {
  double time = 0.0;
  VectorField u;
  TensorField f;

  static State zeros(const Grid& grid);
  const Grid& grid() const { return u[0].grid; }
  /// Throws GridMismatch unless all twelve components share one grid.
  void check_grid() const;
};

/// Nonlinear tendencies (the stiff linear parts are applied by the integrator).
struct Tendency {
  VectorField du;
  TensorField df;
};

/// Spectral images of the four nonlinear terms, kept separate so the energy
/// cancellations can be checked term by term. All products are dealiased.
struct NonlinearTerms {
  VectorField advect_u;   // FFT(u . grad u)
  VectorField stretch_u;  // FFT(sum_j F_.j . grad F_.j)
  TensorField advect_f;   // FFT(u . grad F_.j), entry (i, j)
  TensorField stretch_f;  // FFT(F_.j . grad u), entry (i, j)
};

NonlinearTerms nonlinear_terms(const State& state);

/// du = P(-FFT(u.grad u) + FFT(sum F.grad F)), dF = -FFT(u.grad F) + FFT(F.grad u),
/// all dealiased, k = 0 modes zeroed. Zero when include_nonlinear is false.
/// Evaluated in divergence form, so it matches nonlinear_terms only for states
/// with div u = 0 and div F^T = 0. Throws BlowUpError if any product is NaN or
/// infinite.
Tendency compute_rhs(const State& state, const PhysParams& params, bool include_nonlinear);

/// Unprojected velocity tendency -FFT(u.grad u) + FFT(sum F.grad F), dealiased.
VectorField unprojected_velocity_tendency(const State& state);

/// Pressure from Lap p = -div div(u (x) u) + div div(F F^T); mean pressure zero.
SpectralField solve_pressure(const State& state);

struct DivergenceResiduals {
  double u = 0.0;         // max_k |k.u(k)| / max_k |u(k)|
  double f_columns = 0.0; // max_j max_k |sum_i k_i F_ij(k)| / max_k |F(k)|
};

DivergenceResiduals divergence_residuals(const State& state);

/// Relative sizes of the three discrete energy cancellations:
///   <u.grad u, u>,  sum_j <u.grad F_.j, F_.j>,
///   <sum F.grad F, u> + sum_j <F_.j.grad u, F_.j>,
/// each divided by the matching Cauchy-Schwarz scale.
struct CancellationDefects {
  double advection_u = 0.0;
  double advection_f = 0.0;
  double exchange = 0.0;
};

CancellationDefects energy_cancellations(const State& state);

/// Builds a state from independently generated divergence-free u and F columns.
State make_initial_state(const Grid& grid, const SpectrumProfile& u_profile,
                         const SpectrumProfile& f_profile);

}  // namespace oldroyd
