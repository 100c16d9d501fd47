#pragma once

// Discrete Fourier representation of real fields on a periodic cube.
//
// Convention (used by every module): for a real field f sampled at the n^3
// lattice points x of a box of edge L,
//
//     coeff(k) = (1 / n^3) * sum_x f(x) exp(-i k.x),
//
// so the k = 0 coefficient is the mean and cos(k_min x1) has coefficients 1/2
// at k = (+-k_min, 0, 0). Parseval then reads
//
//     ||f||_{L^2}^2 = L^3 * sum_k |coeff(k)|^2,
//
// and every norm below is reported on that scale.
//
// Coefficients are stored in the r2c half-spectrum layout: index (a, b, c) with
// a, b in [0, n) and c in [0, n/2], linear offset (a * n + b) * (n/2 + 1) + c.
// Lattice index a maps to the integer wavenumber z = a for a < n/2 and a - n
// otherwise, so every axis covers [-n/2, n/2). The Nyquist wavenumber -n/2 has
// no conjugate partner; it is treated as zero by every derivative-type
// operation so that spectral calculus preserves Hermitian symmetry.

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>

#include <Eigen/Core>

namespace oldroyd {

using Complex = std::complex<double>;

/// Cubic periodic lattice with n points per axis and edge length L.
class Grid {
 public:
  Grid(int n_points, double box_length);

  int n() const { return n_; }
  double box_length() const { return box_length_; }
  double k_min() const;
  double volume() const { return box_length_ * box_length_ * box_length_; }
  double spacing() const { return box_length_ / n_; }

  std::size_t physical_size() const;
  std::size_t spectral_size() const;
  int half_n() const { return n_ / 2 + 1; }

  /// Largest |z| per axis that survives dealiasing (3|z| < n).
  int dealias_limit() const { return (n_ - 1) / 3; }
  /// Largest wavenumber magnitude among retained modes (the cube corner).
  double k_max_retained() const;

  /// Integer wavenumber of lattice index idx along a full axis.
  int wavenumber(int idx) const { return idx < n_ / 2 ? idx : idx - n_; }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.n_ == b.n_ && a.box_length_ == b.box_length_;
  }
  friend bool operator!=(const Grid& a, const Grid& b) { return !(a == b); }

 private:
  int n_;
  double box_length_;
};

/// Precomputed per-mode tables for one grid (shared, immutable).
struct SpectralTables {
  /// Differentiation wavenumbers per axis; zero on the Nyquist plane.
  std::array<Eigen::ArrayXd, 3> k;
  /// |k|^2 with the same convention.
  Eigen::ArrayXd k_sq;
  /// 1 for retained modes, 0 for modes removed by the two-thirds rule.
  Eigen::ArrayXd dealias_mask;
  /// Multiplicity of each stored mode in the full lattice (1 or 2).
  Eigen::ArrayXd weight;
};

const SpectralTables& tables(const Grid& grid);

/// Fourier coefficients of one real scalar field.
struct SpectralField {
  Grid grid;
  Eigen::ArrayXcd coeffs;

  explicit SpectralField(const Grid& g);
  SpectralField(const Grid& g, Eigen::ArrayXcd c);

  static SpectralField zeros(const Grid& g) { return SpectralField(g); }

  std::size_t offset(int a, int b, int c) const;
  Complex& at(int a, int b, int c) { return coeffs[static_cast<Eigen::Index>(offset(a, b, c))]; }
  Complex at(int a, int b, int c) const {
    return coeffs[static_cast<Eigen::Index>(offset(a, b, c))];
  }

  /// Coefficient at integer wavevector z (any component in [-n/2, n/2)).
  Complex mode(int z0, int z1, int z2) const;
  /// Sets the coefficient at z and its conjugate partner at -z.
  void set_mode(int z0, int z1, int z2, Complex value);
};

using VectorField = std::array<SpectralField, 3>;

VectorField zero_vector_field(const Grid& grid);

using RealLattice = Eigen::ArrayXd;

/// Samples f(x0, x1, x2) at the lattice points x_i = idx_i * L / n.
RealLattice sample_lattice(const Grid& grid,
                           const std::function<double(double, double, double)>& f);

SpectralField transform_forward(const RealLattice& physical, const Grid& grid);
RealLattice transform_inverse(const SpectralField& field);

/// Largest violation of coeff(-k) = conj(coeff(k)), relative to max |coeff|.
double hermitian_defect(const SpectralField& field);

/// Spectral derivative along axis 0, 1 or 2.
SpectralField gradient(const SpectralField& field, int axis);

/// Spectral divergence sum_j i k_j v_j.
SpectralField divergence(const VectorField& v);

/// Per mode: v - (k.v / |k|^2) k for k != 0; the k = 0 mode is left untouched.
VectorField leray_project(const VectorField& v);

/// Zeroes every mode with some axis index |z| >= n/3.
SpectralField dealias(const SpectralField& field);
void dealias_in_place(SpectralField& field);

/// sum_k |k|^(2 order) |coeff(k)|^2 * L^3. Order 0 is the L^2 norm squared.
double sobolev_seminorm_sq(const SpectralField& field, double order);
double l2_norm_sq(const SpectralField& field);
double l2_norm_sq(const VectorField& v);

/// Real L^2 inner product of two real fields, L^3 * sum_k conj(a(k)) b(k).
double inner_product(const SpectralField& a, const SpectralField& b);

/// Largest coefficient modulus over all stored modes.
double max_abs(const SpectralField& field);

struct SpectrumProfile {
  enum class Shape { flat_low_k_gaussian_cutoff, single_mode, ring };

  Shape shape = Shape::flat_low_k_gaussian_cutoff;
  double cutoff_k = 1.0;
  double target_l2_norm = 0.0;
  std::uint64_t seed = 1;

  /// Modulus envelope of |v(k)|. flat_low_k_gaussian_cutoff uses
  /// exp(-(|k| / cutoff_k)^2); ring keeps the shell | |k| - cutoff_k | <= k_min / 2;
  /// single_mode keeps the axis wavevector (round(cutoff_k / k_min), 0, 0).
  double envelope(const Grid& grid, int z0, int z1, int z2) const;
};

/// Seeded divergence-free random vector field with the requested spectrum.
///
/// Independent complex Gaussian amplitudes per mode are Hermitian-symmetrized,
/// dealiased and Leray-projected; each surviving mode is then rescaled so its
/// vector modulus equals the profile envelope (random direction and phase,
/// deterministic modulus) and the whole field is scaled to target_l2_norm.
VectorField make_divfree_random_field(const Grid& grid, const SpectrumProfile& profile);

}  // namespace oldroyd
