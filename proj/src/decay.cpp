#include "oldroyd/decay.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "oldroyd/error.hpp"

namespace oldroyd {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double quadrature_tolerance = 1e-10;

// amplitude(r)^q r^2, evaluated as a single power so that singular profiles
// (s < 0) stay finite near the origin.
double radial_weight(const RadialProfile& profile, double r, double q) {
  if (profile.kind == RadialProfile::Kind::power && profile.s != 0.0) {
    const double x = r / profile.cutoff;
    return std::pow(r, q * profile.s + 2.0) * std::exp(-q * x * x);
  }
  return std::pow(profile.amplitude(r), q) * r * r;
}

// Adaptive tanh-sinh on each piece between breakpoints; the transform copes
// with the integrable endpoint behaviour of r^s profiles at r = 0.
template <class F>
double integrate_pieces(const F& f, std::vector<double> points) {
  thread_local boost::math::quadrature::tanh_sinh<double> integrator(15);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const double a = points[i], b = points[i + 1];
    if (!(b > a)) continue;
    double error = 0.0, l1 = 0.0;
    const double piece = integrator.integrate(f, a, b, 1e-13, &error, &l1);
    if (!std::isfinite(piece) || error > quadrature_tolerance * std::max(l1, 1e-300)) {
      throw QuadratureError("radial quadrature did not converge on [" + std::to_string(a) +
                            ", " + std::to_string(b) + "] (error estimate " +
                            std::to_string(error) + ")");
    }
    total += piece;
  }
  return total;
}

std::vector<double> pieces_up_to(const RadialProfile& profile, double upper,
                                 std::vector<double> extra = {}) {
  std::vector<double> pts{0.0};
  auto add = [&](double x) {
    if (x > pts.back() && x < upper) pts.push_back(x);
  };
  std::vector<double> cand = profile.breakpoints();
  cand.insert(cand.end(), extra.begin(), extra.end());
  std::sort(cand.begin(), cand.end());
  for (double x : cand) add(x);
  pts.push_back(upper);
  return pts;
}

}  // namespace

void RadialProfile::validate() const {
  if (!(cutoff > 0.0)) throw RangeError("radial profile cutoff must be positive");
  if (!(width >= 0.0)) throw RangeError("radial profile width must be nonnegative");
  if (kind == Kind::power && !(s > -1.5)) {
    throw RangeError("power profile exponent must exceed -3/2 for a finite L^2 mass");
  }
}

double RadialProfile::amplitude(double r) const {
  switch (kind) {
    case Kind::flat_then_gaussian: {
      if (r <= cutoff) return 1.0;
      if (width == 0.0) return 0.0;
      const double x = (r - cutoff) / width;
      return std::exp(-x * x);
    }
    case Kind::power: {
      const double x = r / cutoff;
      const double g = std::exp(-x * x);
      if (s == 0.0) return g;
      return r > 0.0 ? std::pow(r, s) * g : (s > 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    }
  }
  return 0.0;
}

double RadialProfile::support_radius() const {
  // exp(-x^2) < 1e-30 for x > 8.31
  constexpr double x_max = 8.5;
  switch (kind) {
    case Kind::flat_then_gaussian:
      return cutoff + x_max * width;
    case Kind::power:
      return cutoff * (x_max + std::sqrt(std::max(s, 0.0)));
  }
  return cutoff;
}

std::vector<double> RadialProfile::breakpoints() const {
  if (kind == Kind::flat_then_gaussian) return {cutoff};
  return {cutoff};
}

State linear_oracle_evolve(const State& initial, const PhysParams& params, double t) {
  if (!(t >= 0.0)) throw RangeError("oracle time must be nonnegative");
  params.validate();
  initial.check_grid();
  State out = initial;
  const Eigen::ArrayXd decay = (-params.mu * t * tables(initial.grid()).k_sq).exp();
  for (auto& c : out.u) c.coeffs *= decay;
  const double damp = std::exp(-params.nu * t);
  for (auto& c : out.f) c.coeffs *= damp;
  out.time = initial.time + t;
  return out;
}

double quadrature_linear_energy(const RadialProfile& profile, double mu, double t) {
  profile.validate();
  if (!(mu > 0.0)) throw RangeError("mu must be positive");
  if (!(t >= 0.0)) throw RangeError("time must be nonnegative");
  const double a = 2.0 * mu * t;
  auto f = [&](double r) { return std::exp(-a * r * r) * radial_weight(profile, r, 2.0); };
  double upper = profile.support_radius();
  std::vector<double> extra;
  if (a > 0.0) {
    // exp(-a r^2) < 1e-35 beyond this radius
    upper = std::min(upper, std::sqrt(80.0 / a));
    extra.push_back(1.0 / std::sqrt(a));
  }
  return 4.0 * pi * integrate_pieces(f, pieces_up_to(profile, upper, extra));
}

double closed_form_linear_energy(const RadialProfile& profile, double mu, double t) {
  profile.validate();
  if (profile.kind == RadialProfile::Kind::power) {
    const double a = 2.0 * mu * t + 2.0 / (profile.cutoff * profile.cutoff);
    const double e = profile.s + 1.5;
    return 2.0 * pi * std::tgamma(e) * std::pow(a, -e);
  }
  if (profile.width != 0.0) return std::numeric_limits<double>::quiet_NaN();
  const double rad = profile.cutoff;
  const double a = 2.0 * mu * t;
  const double x = a * rad * rad;
  if (x < 0.5) {
    // int_0^R r^2 exp(-a r^2) dr = sum_n (-a)^n R^(2n+3) / (n! (2n+3))
    double term = rad * rad * rad;
    double sum = 0.0;
    for (int n = 0; n < 60; ++n) {
      sum += term / (2.0 * n + 3.0);
      term *= -x / (n + 1.0);
    }
    return 4.0 * pi * sum;
  }
  const double sa = std::sqrt(a);
  return 4.0 * pi *
         (std::sqrt(pi) * std::erf(rad * sa) / (4.0 * a * sa) - rad * std::exp(-x) / (2.0 * a));
}

double profile_lq_norm(const RadialProfile& profile, double q) {
  profile.validate();
  if (std::isinf(q)) {
    if (profile.kind == RadialProfile::Kind::flat_then_gaussian) return 1.0;
    if (profile.s == 0.0) return 1.0;
    if (profile.s < 0.0) return std::numeric_limits<double>::infinity();
    const double r = profile.cutoff * std::sqrt(profile.s / 2.0);
    return profile.amplitude(r);
  }
  if (!(q >= 1.0)) throw RangeError("L^q norm needs q >= 1");
  auto f = [&](double r) { return radial_weight(profile, r, q); };
  const double integral = 4.0 * pi * integrate_pieces(f, pieces_up_to(profile, profile.support_radius()));
  return std::pow(integral, 1.0 / q);
}

ShellIntegral lemma22_shell_integral(const RadialProfile& profile, double p, double gamma,
                                     double t) {
  profile.validate();
  if (!(p >= 1.0 && p <= 2.0)) throw RangeError("p must lie in [1, 2]");
  if (!(gamma > 0.0)) throw RangeError("gamma must be positive");
  if (!(t >= 0.0)) throw RangeError("time must be nonnegative");

  const double g = std::sqrt(gamma / (t + 1.0));
  auto f = [&](double r) { return radial_weight(profile, r, 2.0); };
  ShellIntegral out;
  out.value = 4.0 * pi * integrate_pieces(f, pieces_up_to(profile, g));
  out.bound_exponent = -1.5 * (2.0 / p - 1.0);

  // 1 - 2/q = 2/p - 1
  const double q = p == 1.0 ? std::numeric_limits<double>::infinity() : p / (p - 1.0);
  const double norm = profile_lq_norm(profile, q);
  const double ball = 4.0 * pi * g * g * g / 3.0;
  out.bound = norm * norm * std::pow(ball, 2.0 / p - 1.0);
  return out;
}

DecayFit fit_power_law(const std::vector<std::pair<double, double>>& series, double t_lo,
                       double t_hi) {
  if (!(t_lo < t_hi)) throw FitError("fit window needs t_lo < t_hi");
  std::vector<double> xs, ys;
  for (const auto& [t, v] : series) {
    if (t < t_lo || t > t_hi) continue;
    if (!(v > 0.0)) {
      throw FitError("nonpositive value " + std::to_string(v) + " at t = " + std::to_string(t) +
                     "; the series has decayed to roundoff, shrink the window");
    }
    xs.push_back(std::log1p(t));
    ys.push_back(std::log(v));
  }
  const auto n = xs.size();
  if (n < 5) {
    throw FitError("fit window [" + std::to_string(t_lo) + ", " + std::to_string(t_hi) +
                   "] holds " + std::to_string(n) + " samples, need at least 5");
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw FitError("fit window holds a single distinct time");

  DecayFit fit;
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = ys[i] - (fit.intercept + fit.exponent * xs[i]);
    ssr += e * e;
  }
  fit.stderr_exponent = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
  fit.t_lo = t_lo;
  fit.t_hi = t_hi;
  fit.n_samples = static_cast<int>(n);
  return fit;
}

ValidityWindow validity_window(const Grid& grid, const PhysParams& params, double gamma,
                               double transient_skip, double c_win) {
  params.validate();
  if (!(gamma > 0.0)) throw RangeError("gamma must be positive");
  if (!(c_win > 0.0)) throw RangeError("c_win must be positive");
  const double k_quarter = grid.k_max_retained() / 4.0;
  ValidityWindow w;
  w.t_lo = std::max({transient_skip, 0.0, gamma / (k_quarter * k_quarter) - 1.0});
  w.t_hi = c_win / (params.mu * grid.k_min() * grid.k_min());
  if (w.t_lo >= w.t_hi) {
    // t_hi / (t_lo + 1) grows like n^2; find the first even n that opens the window.
    int n_needed = grid.n();
    for (int n = grid.n() + 2; n <= 4096; n += 2) {
      const ValidityWindow trial{
          std::max({transient_skip, 0.0,
                    gamma / std::pow(Grid(n, grid.box_length()).k_max_retained() / 4.0, 2) - 1.0}),
          w.t_hi};
      if (trial.t_lo < trial.t_hi) {
        n_needed = n;
        break;
      }
    }
    throw RangeError("validity window is empty: t_lo = " + std::to_string(w.t_lo) +
                     " >= t_hi = " + std::to_string(w.t_hi) + "; need n_points >= " +
                     std::to_string(n_needed) + " at box_length " +
                     std::to_string(grid.box_length()) + " (or a larger box with a shorter "
                     "transient skip)");
  }
  return w;
}

double lattice_linear_energy(const State& initial, const PhysParams& params, double t,
                             int derivative_order) {
  params.validate();
  const auto& tb = tables(initial.grid());
  Eigen::ArrayXd u_sq = Eigen::ArrayXd::Zero(tb.k_sq.size());
  for (const auto& c : initial.u) u_sq += c.coeffs.abs2();
  Eigen::ArrayXd f_sq = Eigen::ArrayXd::Zero(tb.k_sq.size());
  for (const auto& c : initial.f) f_sq += c.coeffs.abs2();
  const Eigen::ArrayXd weight =
      derivative_order == 0 ? tb.weight : Eigen::ArrayXd(tb.weight * tb.k_sq.pow(derivative_order));
  const double vol = initial.grid().volume();
  return vol * ((weight * (-2.0 * params.mu * t * tb.k_sq).exp() * u_sq).sum() +
                std::exp(-2.0 * params.nu * t) * (weight * f_sq).sum());
}

}  // namespace oldroyd
