#include "oldroyd/oldroyd_system.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "fft_engine.hpp"
#include "oldroyd/error.hpp"

namespace oldroyd {

void PhysParams::validate() const {
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw RangeError("params.mu must be positive, got " + std::to_string(mu));
  }
  if (!(nu >= 0.0) || !std::isfinite(nu)) {
    throw RangeError("params.nu must be nonnegative, got " + std::to_string(nu));
  }
}

TensorField zero_tensor_field(const Grid& g) {
  return {SpectralField(g), SpectralField(g), SpectralField(g), SpectralField(g), SpectralField(g),
          SpectralField(g), SpectralField(g), SpectralField(g), SpectralField(g)};
}

VectorField column(const TensorField& f, int j) {
  return {f[tensor_index(0, j)], f[tensor_index(1, j)], f[tensor_index(2, j)]};
}

State State::zeros(const Grid& grid) {
  return State{0.0, zero_vector_field(grid), zero_tensor_field(grid)};
}

void State::check_grid() const {
  const Grid& g = grid();
  for (const auto& c : u)
    if (c.grid != g) throw GridMismatch("velocity components live on different grids");
  for (const auto& c : f)
    if (c.grid != g) throw GridMismatch("deformation tensor lives on a different grid");
}

namespace {

using Eigen::ArrayXd;

// Physical-space values of u, grad u and F, shared by every nonlinear term.
struct PhysicalState {
  std::array<ArrayXd, 3> u;
  std::array<ArrayXd, 9> grad_u;  // (i, k) -> d_k u_i at 3 * i + k
  std::array<ArrayXd, 9> f;
};

PhysicalState to_physical(const State& s) {
  PhysicalState p;
  for (int i = 0; i < 3; ++i) {
    p.u[i] = transform_inverse(s.u[i]);
    for (int k = 0; k < 3; ++k) p.grad_u[3 * i + k] = transform_inverse(gradient(s.u[i], k));
  }
  for (int m = 0; m < 9; ++m) p.f[m] = transform_inverse(s.f[m]);
  return p;
}

void require_finite(const Eigen::Ref<const ArrayXd>& a, const char* what) {
  if (!a.allFinite()) {
    throw BlowUpError(std::string("non-finite values in ") + what, -1, std::nan(""), what);
  }
}

SpectralField forward_dealiased(const ArrayXd& a, const Grid& g) {
  Eigen::ArrayXcd c(static_cast<Eigen::Index>(g.spectral_size()));
  detail::fft_engine(g.n()).forward(a.data(), c.data());
  c *= tables(g).dealias_mask * (1.0 / static_cast<double>(g.physical_size()));
  return SpectralField(g, std::move(c));
}

void zero_mean(SpectralField& f) { f.coeffs[0] = Complex(0.0, 0.0); }

// Per-thread FFTW-aligned buffers for compute_rhs: u and F in physical space,
// one product buffer and one spectral scratch array.
struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

struct RhsWorkspace {
  int n = 0;
  std::array<std::unique_ptr<double[], FftwFree>, 12> phys;
  std::unique_ptr<double[], FftwFree> prod;
  std::unique_ptr<Complex[], FftwFree> spec;

  void ensure(const Grid& g) {
    if (n == g.n()) return;
    for (auto& b : phys) b.reset(fftw_alloc_real(g.physical_size()));
    prod.reset(fftw_alloc_real(g.physical_size()));
    spec.reset(reinterpret_cast<Complex*>(fftw_alloc_complex(g.spectral_size())));
    n = g.n();
  }
};

RhsWorkspace& rhs_workspace() {
  thread_local RhsWorkspace w;
  return w;
}

// With c = scale * mask * spec: d1 (+)= s1 i k1 c and, if d2 is given, d2 (+)= s2 i k2 c.
// The first contribution to a target assigns instead of accumulating.
template <bool Add1, bool Add2, bool Two>
void scatter_kernel(const Complex* spec, const double* mask, double scale, Complex* d1, double s1,
                    const double* k1, Complex* d2, double s2, const double* k2, Eigen::Index size) {
  for (Eigen::Index m = 0; m < size; ++m) {
    const double w = scale * mask[m];
    const Complex ic(-w * spec[m].imag(), w * spec[m].real());
    const Complex v1 = (s1 * k1[m]) * ic;
    d1[m] = Add1 ? d1[m] + v1 : v1;
    if constexpr (Two) {
      const Complex v2 = (s2 * k2[m]) * ic;
      d2[m] = Add2 ? d2[m] + v2 : v2;
    }
  }
}

void scatter_derivative(const Complex* spec, const SpectralTables& t, double scale,
                        Eigen::ArrayXcd& d1, bool& touched1, double s1, const ArrayXd& k1,
                        Eigen::ArrayXcd* d2, bool* touched2, double s2, const ArrayXd* k2) {
  const Eigen::Index n = d1.size();
  const double* mask = t.dealias_mask.data();
  if (!d2) {
    if (touched1)
      scatter_kernel<true, false, false>(spec, mask, scale, d1.data(), s1, k1.data(), nullptr, 0,
                                         nullptr, n);
    else
      scatter_kernel<false, false, false>(spec, mask, scale, d1.data(), s1, k1.data(), nullptr, 0,
                                          nullptr, n);
  } else {
    Complex* p2 = d2->data();
    const double* q2 = k2->data();
    if (touched1 && *touched2)
      scatter_kernel<true, true, true>(spec, mask, scale, d1.data(), s1, k1.data(), p2, s2, q2, n);
    else if (touched1)
      scatter_kernel<true, false, true>(spec, mask, scale, d1.data(), s1, k1.data(), p2, s2, q2, n);
    else if (*touched2)
      scatter_kernel<false, true, true>(spec, mask, scale, d1.data(), s1, k1.data(), p2, s2, q2, n);
    else
      scatter_kernel<false, false, true>(spec, mask, scale, d1.data(), s1, k1.data(), p2, s2, q2,
                                         n);
    *touched2 = true;
  }
  touched1 = true;
}

// The zero mode of an unnormalised forward transform is the plain sum of the
// product, so it is finite exactly when every sample is (barring overflow of
// the sum itself, which is a blow-up too).
void require_finite_sum(const Complex* spec, const char* what) {
  if (!std::isfinite(spec[0].real())) {
    throw BlowUpError(std::string("non-finite values in ") + what, -1, std::nan(""), what);
  }
}

}  // namespace

NonlinearTerms nonlinear_terms(const State& state) {
  state.check_grid();
  const Grid& g = state.grid();
  const PhysicalState p = to_physical(state);

  NonlinearTerms out{zero_vector_field(g), zero_vector_field(g), zero_tensor_field(g),
                     zero_tensor_field(g)};
  const auto npts = static_cast<Eigen::Index>(g.physical_size());
  std::array<ArrayXd, 3> stretch_u;
  for (auto& a : stretch_u) a = ArrayXd::Zero(npts);

  for (int i = 0; i < 3; ++i) {
    ArrayXd adv = p.u[0] * p.grad_u[3 * i] + p.u[1] * p.grad_u[3 * i + 1] +
                  p.u[2] * p.grad_u[3 * i + 2];
    require_finite(adv, "u.grad u");
    out.advect_u[i] = forward_dealiased(adv, g);
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const SpectralField& fij = state.f[tensor_index(i, j)];
      std::array<ArrayXd, 3> grad_f;
      for (int k = 0; k < 3; ++k) grad_f[k] = transform_inverse(gradient(fij, k));

      ArrayXd adv = p.u[0] * grad_f[0] + p.u[1] * grad_f[1] + p.u[2] * grad_f[2];
      require_finite(adv, "u.grad F");
      out.advect_f[tensor_index(i, j)] = forward_dealiased(adv, g);

      // (F_.j . grad F_.j)_i = sum_k F_kj d_k F_ij
      stretch_u[i] += p.f[tensor_index(0, j)] * grad_f[0] + p.f[tensor_index(1, j)] * grad_f[1] +
                      p.f[tensor_index(2, j)] * grad_f[2];

      // (F_.j . grad u)_i = sum_k F_kj d_k u_i
      ArrayXd str = p.f[tensor_index(0, j)] * p.grad_u[3 * i] +
                    p.f[tensor_index(1, j)] * p.grad_u[3 * i + 1] +
                    p.f[tensor_index(2, j)] * p.grad_u[3 * i + 2];
      require_finite(str, "F.grad u");
      out.stretch_f[tensor_index(i, j)] = forward_dealiased(str, g);
    }
  }
  for (int i = 0; i < 3; ++i) {
    require_finite(stretch_u[i], "F.grad F");
    out.stretch_u[i] = forward_dealiased(stretch_u[i], g);
  }
  return out;
}

Tendency compute_rhs(const State& state, const PhysParams& params, bool include_nonlinear) {
  params.validate();
  state.check_grid();
  const Grid& g = state.grid();
  if (!include_nonlinear) return Tendency{zero_vector_field(g), zero_tensor_field(g)};

  // Conservative form, valid because div u = 0 and div F^T = 0 hold on the
  // retained modes:
  //   du_i  = -d_k (u_i u_k - (F F^T)_ik)
  //   dF_ij = -d_k (u_k F_ij - u_i F_kj)
  // Products of dealiased fields are alias-free, so this equals the advective
  // form to roundoff, needs only u and F in physical space (12 inverse and 15
  // forward transforms), and the F flux is antisymmetric in (k, i), so the
  // column divergence of dF vanishes identically.
  const auto& t = tables(g);
  const auto& fft = detail::fft_engine(g.n());
  RhsWorkspace& w = rhs_workspace();
  w.ensure(g);
  const auto np = static_cast<Eigen::Index>(g.physical_size());
  const auto ns = static_cast<Eigen::Index>(g.spectral_size());
  const double scale = 1.0 / static_cast<double>(np);

  // Inputs are masked on the way in, so the pruned transforms see exactly the
  // retained modes; every target below is assigned by its first contribution.
  for (int m = 0; m < 12; ++m) {
    const SpectralField& src = m < 3 ? state.u[m] : state.f[m - 3];
    Eigen::Map<Eigen::ArrayXcd>(w.spec.get(), ns) = src.coeffs * t.dealias_mask;
    fft.inverse_pruned_raw(w.spec.get(), w.phys[m].get());
  }
  auto uninit = [&] { return SpectralField(g, Eigen::ArrayXcd(ns)); };
  Tendency out{{uninit(), uninit(), uninit()},
               {uninit(), uninit(), uninit(), uninit(), uninit(), uninit(), uninit(), uninit(),
                uninit()}};
  std::array<bool, 3> du_touched{};
  std::array<bool, 9> df_touched{};

  using Map = Eigen::Map<ArrayXd>;
  auto u = [&](int i) { return Map(w.phys[i].get(), np); };
  auto f = [&](int i, int j) { return Map(w.phys[3 + tensor_index(i, j)].get(), np); };
  Map prod(w.prod.get(), np);

  for (int i = 0; i < 3; ++i) {
    for (int k = i; k < 3; ++k) {
      prod = u(i) * u(k) - f(i, 0) * f(k, 0) - f(i, 1) * f(k, 1) - f(i, 2) * f(k, 2);
      fft.forward_pruned_raw(w.prod.get(), w.spec.get());
      require_finite_sum(w.spec.get(), "u tendency");
      scatter_derivative(w.spec.get(), t, scale, out.du[i].coeffs, du_touched[i], -1.0, t.k[k],
                         k != i ? &out.du[k].coeffs : nullptr, &du_touched[k], -1.0, &t.k[i]);
    }
  }
  for (int j = 0; j < 3; ++j) {
    for (int a = 0; a < 3; ++a) {
      for (int b = a + 1; b < 3; ++b) {
        prod = u(a) * f(b, j) - u(b) * f(a, j);
        fft.forward_pruned_raw(w.prod.get(), w.spec.get());
        require_finite_sum(w.spec.get(), "F tendency");
        const int bj = tensor_index(b, j), aj = tensor_index(a, j);
        scatter_derivative(w.spec.get(), t, scale, out.df[bj].coeffs, df_touched[bj], -1.0,
                           t.k[a], &out.df[aj].coeffs, &df_touched[aj], 1.0, &t.k[b]);
      }
    }
  }
  for (auto& c : out.df) zero_mean(c);
  out.du = leray_project(out.du);
  for (auto& c : out.du) zero_mean(c);
  return out;
}

VectorField unprojected_velocity_tendency(const State& state) {
  const NonlinearTerms t = nonlinear_terms(state);
  VectorField out = t.stretch_u;
  for (int i = 0; i < 3; ++i) out[i].coeffs -= t.advect_u[i].coeffs;
  return out;
}

SpectralField solve_pressure(const State& state) {
  state.check_grid();
  const Grid& g = state.grid();
  const auto& t = tables(g);
  std::array<ArrayXd, 3> u;
  std::array<ArrayXd, 9> f;
  for (int i = 0; i < 3; ++i) u[i] = transform_inverse(state.u[i]);
  for (int m = 0; m < 9; ++m) f[m] = transform_inverse(state.f[m]);

  // Accumulates sum_ij k_i k_j FFT(u_i u_j - (F F^T)_ij), which equals
  // s_u - s_F for the double divergences s = sum_ij (i k_i)(i k_j) FFT(.).
  Eigen::ArrayXcd kk_sum = Eigen::ArrayXcd::Zero(static_cast<Eigen::Index>(g.spectral_size()));
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      ArrayXd prod = u[i] * u[j];
      for (int k = 0; k < 3; ++k) prod -= f[tensor_index(i, k)] * f[tensor_index(j, k)];
      const SpectralField ph = forward_dealiased(prod, g);
      const double mult = (i == j) ? 1.0 : 2.0;
      kk_sum += mult * (t.k[i] * t.k[j]) * ph.coeffs;
    }
  }
  // -|k|^2 p = -s_u + s_F = kk_sum
  SpectralField p(g);
  const Eigen::ArrayXd inv = (t.k_sq > 0.0).select(t.k_sq.inverse(), 0.0);
  p.coeffs = -kk_sum * inv;
  zero_mean(p);
  return p;
}

DivergenceResiduals divergence_residuals(const State& state) {
  state.check_grid();
  const auto& t = tables(state.grid());
  DivergenceResiduals r;

  auto vector_residual = [&](const VectorField& v, double scale) {
    if (scale == 0.0) return 0.0;
    const Eigen::ArrayXcd kv = t.k[0] * v[0].coeffs + t.k[1] * v[1].coeffs + t.k[2] * v[2].coeffs;
    return kv.abs().maxCoeff() / scale;
  };

  const double u_scale =
      (state.u[0].coeffs.abs2() + state.u[1].coeffs.abs2() + state.u[2].coeffs.abs2())
          .sqrt()
          .maxCoeff();
  r.u = vector_residual(state.u, u_scale);

  Eigen::ArrayXd f_mod = Eigen::ArrayXd::Zero(state.f[0].coeffs.size());
  for (const auto& c : state.f) f_mod += c.coeffs.abs2();
  const double f_scale = std::sqrt(f_mod.maxCoeff());
  for (int j = 0; j < 3; ++j) {
    r.f_columns = std::max(r.f_columns, vector_residual(column(state.f, j), f_scale));
  }
  return r;
}

CancellationDefects energy_cancellations(const State& state) {
  const NonlinearTerms t = nonlinear_terms(state);
  auto norm = [](const SpectralField& a) { return std::sqrt(l2_norm_sq(a)); };
  auto safe_ratio = [](double num, double den) { return den > 0.0 ? std::abs(num) / den : 0.0; };

  CancellationDefects d;
  double num = 0.0, den = 0.0;
  for (int i = 0; i < 3; ++i) {
    num += inner_product(t.advect_u[i], state.u[i]);
    den += norm(t.advect_u[i]) * norm(state.u[i]);
  }
  d.advection_u = safe_ratio(num, den);

  num = den = 0.0;
  for (int m = 0; m < 9; ++m) {
    num += inner_product(t.advect_f[m], state.f[m]);
    den += norm(t.advect_f[m]) * norm(state.f[m]);
  }
  d.advection_f = safe_ratio(num, den);

  num = den = 0.0;
  for (int i = 0; i < 3; ++i) {
    num += inner_product(t.stretch_u[i], state.u[i]);
    den += norm(t.stretch_u[i]) * norm(state.u[i]);
  }
  for (int m = 0; m < 9; ++m) {
    num += inner_product(t.stretch_f[m], state.f[m]);
    den += norm(t.stretch_f[m]) * norm(state.f[m]);
  }
  d.exchange = safe_ratio(num, den);
  return d;
}

namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

State make_initial_state(const Grid& grid, const SpectrumProfile& u_profile,
                         const SpectrumProfile& f_profile) {
  State s = State::zeros(grid);
  s.u = make_divfree_random_field(grid, u_profile);
  SpectrumProfile col = f_profile;
  col.target_l2_norm = f_profile.target_l2_norm / std::sqrt(3.0);
  for (int j = 0; j < 3; ++j) {
    col.seed = derive_seed(f_profile.seed, static_cast<std::uint64_t>(j));
    const VectorField v = make_divfree_random_field(grid, col);
    for (int i = 0; i < 3; ++i) s.f[tensor_index(i, j)] = v[i];
  }
  return s;
}

}  // namespace oldroyd
