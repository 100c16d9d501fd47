#include "oldroyd/spectral.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <string>
#include <utility>

#include "fft_engine.hpp"
#include "oldroyd/error.hpp"

namespace oldroyd {

Grid::Grid(int n_points, double box_length) : n_(n_points), box_length_(box_length) {
  if (n_points < 8 || n_points % 2 != 0) {
    throw RangeError("grid.n_points must be even and >= 8, got " + std::to_string(n_points));
  }
  if (!(box_length > 0.0) || !std::isfinite(box_length)) {
    throw RangeError("grid.box_length must be positive, got " + std::to_string(box_length));
  }
}

double Grid::k_min() const { return 2.0 * std::numbers::pi / box_length_; }

std::size_t Grid::physical_size() const {
  return static_cast<std::size_t>(n_) * n_ * n_;
}

std::size_t Grid::spectral_size() const {
  return static_cast<std::size_t>(n_) * n_ * half_n();
}

double Grid::k_max_retained() const {
  return k_min() * dealias_limit() * std::sqrt(3.0);
}

const SpectralTables& tables(const Grid& grid) {
  static std::mutex m;
  static std::map<std::pair<int, double>, std::unique_ptr<SpectralTables>> cache;
  std::lock_guard<std::mutex> lock(m);
  auto key = std::make_pair(grid.n(), grid.box_length());
  auto it = cache.find(key);
  if (it != cache.end()) return *it->second;

  const int n = grid.n();
  const int nh = grid.half_n();
  const auto size = static_cast<Eigen::Index>(grid.spectral_size());
  const double kmin = grid.k_min();
  const int limit = grid.dealias_limit();

  auto t = std::make_unique<SpectralTables>();
  for (auto& k : t->k) k.resize(size);
  t->k_sq.resize(size);
  t->dealias_mask.resize(size);
  t->weight.resize(size);

  auto diff_k = [&](int z) { return z == -n / 2 ? 0.0 : kmin * z; };
  Eigen::Index idx = 0;
  for (int a = 0; a < n; ++a) {
    const int z0 = grid.wavenumber(a);
    for (int b = 0; b < n; ++b) {
      const int z1 = grid.wavenumber(b);
      for (int c = 0; c < nh; ++c, ++idx) {
        const int z2 = grid.wavenumber(c);
        t->k[0][idx] = diff_k(z0);
        t->k[1][idx] = diff_k(z1);
        t->k[2][idx] = diff_k(z2);
        t->k_sq[idx] = t->k[0][idx] * t->k[0][idx] + t->k[1][idx] * t->k[1][idx] +
                       t->k[2][idx] * t->k[2][idx];
        const bool kept = std::abs(z0) <= limit && std::abs(z1) <= limit && std::abs(z2) <= limit;
        t->dealias_mask[idx] = kept ? 1.0 : 0.0;
        t->weight[idx] = (c == 0 || c == n / 2) ? 1.0 : 2.0;
      }
    }
  }
  return *cache.emplace(key, std::move(t)).first->second;
}

SpectralField::SpectralField(const Grid& g)
    : grid(g), coeffs(Eigen::ArrayXcd::Zero(static_cast<Eigen::Index>(g.spectral_size()))) {}

SpectralField::SpectralField(const Grid& g, Eigen::ArrayXcd c) : grid(g), coeffs(std::move(c)) {
  if (static_cast<std::size_t>(coeffs.size()) != g.spectral_size()) {
    throw GridMismatch("coefficient array has " + std::to_string(coeffs.size()) +
                       " entries, grid expects " + std::to_string(g.spectral_size()));
  }
}

std::size_t SpectralField::offset(int a, int b, int c) const {
  const auto n = static_cast<std::size_t>(grid.n());
  return (static_cast<std::size_t>(a) * n + static_cast<std::size_t>(b)) *
             static_cast<std::size_t>(grid.half_n()) +
         static_cast<std::size_t>(c);
}

namespace {

int lattice_index(int z, int n) { return ((z % n) + n) % n; }

}  // namespace

Complex SpectralField::mode(int z0, int z1, int z2) const {
  const int n = grid.n();
  const int c = lattice_index(z2, n);
  if (c <= n / 2) return at(lattice_index(z0, n), lattice_index(z1, n), c);
  return std::conj(at(lattice_index(-z0, n), lattice_index(-z1, n), lattice_index(-z2, n)));
}

void SpectralField::set_mode(int z0, int z1, int z2, Complex value) {
  const int n = grid.n();
  const int a = lattice_index(z0, n), b = lattice_index(z1, n), c = lattice_index(z2, n);
  const int pa = lattice_index(-z0, n), pb = lattice_index(-z1, n), pc = lattice_index(-z2, n);
  if (c <= n / 2) at(a, b, c) = value;
  if (pc <= n / 2) at(pa, pb, pc) = std::conj(value);
  if (a == pa && b == pb && c == pc) at(a, b, c) = Complex(value.real(), 0.0);
}

VectorField zero_vector_field(const Grid& grid) {
  return {SpectralField(grid), SpectralField(grid), SpectralField(grid)};
}

RealLattice sample_lattice(const Grid& grid,
                           const std::function<double(double, double, double)>& f) {
  const int n = grid.n();
  const double h = grid.spacing();
  RealLattice out(static_cast<Eigen::Index>(grid.physical_size()));
  Eigen::Index idx = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) out[idx++] = f(i * h, j * h, k * h);
  return out;
}

SpectralField transform_forward(const RealLattice& physical, const Grid& grid) {
  if (static_cast<std::size_t>(physical.size()) != grid.physical_size()) {
    throw GridMismatch("physical array has " + std::to_string(physical.size()) +
                       " points, grid expects " + std::to_string(grid.physical_size()));
  }
  Eigen::ArrayXcd c(static_cast<Eigen::Index>(grid.spectral_size()));
  detail::fft_engine(grid.n()).forward(physical.data(), c.data());
  c *= 1.0 / static_cast<double>(grid.physical_size());
  return SpectralField(grid, std::move(c));
}

double hermitian_defect(const SpectralField& field) {
  const int n = field.grid.n();
  const double scale = max_abs(field);
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  for (int c : {0, n / 2}) {
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        const Complex partner = field.at((n - a) % n, (n - b) % n, c);
        worst = std::max(worst, std::abs(field.at(a, b, c) - std::conj(partner)));
      }
    }
  }
  return worst / scale;
}

RealLattice transform_inverse(const SpectralField& field) {
  constexpr double tolerance = 1e-10;
  const double defect = hermitian_defect(field);
  if (defect > tolerance) {
    throw SymmetryError("coefficients violate Hermitian symmetry (relative defect " +
                        std::to_string(defect) + ")");
  }
  RealLattice out(static_cast<Eigen::Index>(field.grid.physical_size()));
  detail::fft_engine(field.grid.n()).inverse(field.coeffs.data(), out.data());
  return out;
}

SpectralField gradient(const SpectralField& field, int axis) {
  if (axis < 0 || axis > 2) throw RangeError("gradient axis must be 0, 1 or 2");
  const auto& t = tables(field.grid);
  return SpectralField(field.grid, field.coeffs * (Complex(0.0, 1.0) * t.k[axis]));
}

namespace {

void require_same_grid(const VectorField& v) {
  if (v[0].grid != v[1].grid || v[0].grid != v[2].grid) {
    throw GridMismatch("vector components live on different grids");
  }
}

}  // namespace

SpectralField divergence(const VectorField& v) {
  require_same_grid(v);
  const auto& t = tables(v[0].grid);
  const Complex i(0.0, 1.0);
  return SpectralField(v[0].grid, i * (t.k[0] * v[0].coeffs + t.k[1] * v[1].coeffs +
                                       t.k[2] * v[2].coeffs));
}

VectorField leray_project(const VectorField& v) {
  require_same_grid(v);
  const auto& t = tables(v[0].grid);
  const Eigen::ArrayXd inv_k_sq = (t.k_sq > 0.0).select(t.k_sq.inverse(), 0.0);
  const Eigen::ArrayXcd k_dot_v =
      (t.k[0] * v[0].coeffs + t.k[1] * v[1].coeffs + t.k[2] * v[2].coeffs) * inv_k_sq;
  VectorField out = v;
  for (int j = 0; j < 3; ++j) out[j].coeffs -= k_dot_v * t.k[j];
  return out;
}

SpectralField dealias(const SpectralField& field) {
  SpectralField out = field;
  dealias_in_place(out);
  return out;
}

void dealias_in_place(SpectralField& field) { field.coeffs *= tables(field.grid).dealias_mask; }

double sobolev_seminorm_sq(const SpectralField& field, double order) {
  if (order < 0.0) throw RangeError("Sobolev order must be nonnegative");
  const auto& t = tables(field.grid);
  const double v = field.grid.volume();
  if (order == 0.0) return v * (t.weight * field.coeffs.abs2()).sum();
  return v * (t.weight * t.k_sq.pow(order) * field.coeffs.abs2()).sum();
}

double l2_norm_sq(const SpectralField& field) { return sobolev_seminorm_sq(field, 0.0); }

double l2_norm_sq(const VectorField& v) {
  return l2_norm_sq(v[0]) + l2_norm_sq(v[1]) + l2_norm_sq(v[2]);
}

double inner_product(const SpectralField& a, const SpectralField& b) {
  if (a.grid != b.grid) throw GridMismatch("inner product of fields on different grids");
  const auto& t = tables(a.grid);
  return a.grid.volume() * (t.weight * (a.coeffs.conjugate() * b.coeffs).real()).sum();
}

double max_abs(const SpectralField& field) {
  return field.coeffs.size() == 0 ? 0.0 : field.coeffs.abs().maxCoeff();
}

double SpectrumProfile::envelope(const Grid& grid, int z0, int z1, int z2) const {
  const double kmin = grid.k_min();
  const double k = kmin * std::sqrt(static_cast<double>(z0 * z0 + z1 * z1 + z2 * z2));
  switch (shape) {
    case Shape::flat_low_k_gaussian_cutoff: {
      const double x = k / cutoff_k;
      return std::exp(-x * x);
    }
    case Shape::ring:
      return std::abs(k - cutoff_k) <= 0.5 * kmin ? 1.0 : 0.0;
    case Shape::single_mode: {
      const int zs = static_cast<int>(std::lround(cutoff_k / kmin));
      return (std::abs(z0) == zs && z1 == 0 && z2 == 0) ? 1.0 : 0.0;
    }
  }
  return 0.0;
}

VectorField make_divfree_random_field(const Grid& grid, const SpectrumProfile& profile) {
  if (!(profile.cutoff_k > 0.0)) throw RangeError("profile cutoff_k must be positive");
  if (!(profile.target_l2_norm >= 0.0)) throw RangeError("profile target_l2_norm must be >= 0");

  const int n = grid.n();
  const int nh = grid.half_n();
  const int limit = grid.dealias_limit();
  VectorField v = zero_vector_field(grid);
  if (profile.target_l2_norm == 0.0) return v;

  std::mt19937_64 rng(profile.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (auto& comp : v) {
    for (Eigen::Index i = 0; i < comp.coeffs.size(); ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      comp.coeffs[i] = Complex(re, im);
    }
  }

  // Envelope, dealiasing and the zero mean in one pass; then make the two
  // self-conjugate planes consistent.
  Eigen::ArrayXd env(static_cast<Eigen::Index>(grid.spectral_size()));
  Eigen::Index idx = 0;
  for (int a = 0; a < n; ++a) {
    const int z0 = grid.wavenumber(a);
    for (int b = 0; b < n; ++b) {
      const int z1 = grid.wavenumber(b);
      for (int c = 0; c < nh; ++c, ++idx) {
        const int z2 = grid.wavenumber(c);
        const bool kept = std::abs(z0) <= limit && std::abs(z1) <= limit && std::abs(z2) <= limit;
        const bool mean = z0 == 0 && z1 == 0 && z2 == 0;
        env[idx] = (kept && !mean) ? profile.envelope(grid, z0, z1, z2) : 0.0;
      }
    }
  }
  for (auto& comp : v) {
    comp.coeffs *= env;
    for (int c : {0, n / 2}) {
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
          const int pa = (n - a) % n, pb = (n - b) % n;
          const std::size_t self = comp.offset(a, b, c), partner = comp.offset(pa, pb, c);
          if (self == partner) {
            comp.at(a, b, c) = Complex(comp.at(a, b, c).real(), 0.0);
          } else if (self > partner) {
            comp.at(a, b, c) = std::conj(comp.at(pa, pb, c));
          }
        }
      }
    }
  }

  v = leray_project(v);

  const Eigen::ArrayXd modulus =
      (v[0].coeffs.abs2() + v[1].coeffs.abs2() + v[2].coeffs.abs2()).sqrt();
  const Eigen::ArrayXd rescale = (modulus > 0.0).select(env / modulus, 0.0);
  for (auto& comp : v) comp.coeffs *= rescale;

  const double norm_sq = l2_norm_sq(v);
  if (!(norm_sq > 0.0)) {
    throw RangeError("spectrum profile produces an identically zero field on this grid");
  }
  const double s = profile.target_l2_norm / std::sqrt(norm_sq);
  for (auto& comp : v) comp.coeffs *= s;
  return v;
}

}  // namespace oldroyd
