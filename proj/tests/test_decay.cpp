#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <string>

#include "oldroyd/decay.hpp"
#include "oldroyd/error.hpp"
#include "support.hpp"

using namespace oldroyd;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const double pi = std::numbers::pi;

std::vector<double> geometric(double t0, double t1, int n) {
  std::vector<double> t;
  for (int i = 0; i < n; ++i) t.push_back(t0 * std::pow(t1 / t0, double(i) / (n - 1)));
  return t;
}

}  // namespace

TEST_CASE("linear oracle", "[oracle]") {
  const Grid g(16, 2.0 * pi * 2.0);
  const PhysParams params{0.6, 1.4};
  const State s0 = test_support::random_state(g, 1);

  const State same = linear_oracle_evolve(s0, params, 0.0);
  CHECK(test_support::max_rel_diff(same, s0) == 0.0);

  const State a = linear_oracle_evolve(linear_oracle_evolve(s0, params, 0.7), params, 1.9);
  const State b = linear_oracle_evolve(s0, params, 2.6);
  CHECK(test_support::max_rel_diff(a, b) < 1e-14);
  CHECK(b.time == 2.6);

  CHECK_THROWS_AS(linear_oracle_evolve(s0, params, -1.0), RangeError);

  // d/dt ||u||^2 = -2 mu ||grad u||^2, by central differencing.
  const double t = 0.8, h = 1e-4;
  const double du = l2_norm_sq(linear_oracle_evolve(s0, params, t + h).u) -
                    l2_norm_sq(linear_oracle_evolve(s0, params, t - h).u);
  const State mid = linear_oracle_evolve(s0, params, t);
  double grad = 0.0;
  for (const auto& c : mid.u) grad += sobolev_seminorm_sq(c, 1.0);
  CHECK_THAT(du / (2.0 * h), WithinRel(-2.0 * params.mu * grad, 1e-6));
}

TEST_CASE("radial profiles", "[profile]") {
  const auto flat = RadialProfile::flat(2.0);
  CHECK(flat.amplitude(0.0) == 1.0);
  CHECK(flat.amplitude(2.0) == 1.0);
  CHECK(flat.amplitude(2.0001) == 0.0);
  const auto soft = RadialProfile::flat(2.0, 0.5);
  CHECK_THAT(soft.amplitude(2.5), WithinRel(std::exp(-1.0), 1e-15));
  const auto gauss = RadialProfile::power(0.0, std::sqrt(2.0));
  CHECK_THAT(gauss.amplitude(1.0), WithinRel(std::exp(-0.5), 1e-15));
  CHECK_THROWS_AS(RadialProfile::power(-1.5, 1.0).validate(), RangeError);
  CHECK_THROWS_AS(RadialProfile::flat(0.0).validate(), RangeError);
}

TEST_CASE("quadrature of the linear energy", "[quadrature]") {
  SECTION("sharp ball at t = 0") {
    for (double radius : {0.5, 1.0, 3.0}) {
      const auto p = RadialProfile::flat(radius);
      CHECK_THAT(quadrature_linear_energy(p, 1.0, 0.0), WithinRel(4.0 * pi * std::pow(radius, 3) / 3.0, 1e-12));
      CHECK_THAT(closed_form_linear_energy(p, 1.0, 0.0), WithinRel(4.0 * pi * std::pow(radius, 3) / 3.0, 1e-14));
    }
  }
  SECTION("Gaussian closed form") {
    const auto p = RadialProfile::power(0.0, std::sqrt(2.0));
    for (double t : geometric(1e-3, 1e4, 30)) {
      const double exact = std::pow(pi, 1.5) * std::pow(2.0 * t + 1.0, -1.5);
      CHECK_THAT(quadrature_linear_energy(p, 1.0, t), WithinRel(exact, 1e-8));
      CHECK_THAT(closed_form_linear_energy(p, 1.0, t), WithinRel(exact, 1e-13));
    }
  }
  SECTION("power and sharp-ball closed forms agree with quadrature") {
    for (double s : {-0.75, -0.25, 0.5, 2.0}) {
      const auto p = RadialProfile::power(s, 1.3);
      for (double t : {0.0, 0.3, 7.0, 900.0}) {
        CHECK_THAT(quadrature_linear_energy(p, 0.8, t), WithinRel(closed_form_linear_energy(p, 0.8, t), 1e-9));
      }
    }
    const auto ball = RadialProfile::flat(1.5);
    for (double t : {1e-4, 0.05, 0.2, 1.0, 40.0, 1e4}) {
      CHECK_THAT(quadrature_linear_energy(ball, 1.0, t), WithinRel(closed_form_linear_energy(ball, 1.0, t), 1e-10));
    }
    CHECK(std::isnan(closed_form_linear_energy(RadialProfile::flat(1.0, 0.3), 1.0, 1.0)));
  }
  SECTION("flat profile decays like (1 + t)^(-3/2)") {
    for (double width : {0.0, 0.25}) {
      std::vector<std::pair<double, double>> series;
      for (double t : geometric(1e2, 1e4, 40))
        series.emplace_back(t, quadrature_linear_energy(RadialProfile::flat(1.0, width), 1.0, t));
      const DecayFit f = fit_power_law(series, 1e2, 1e4);
      CHECK_THAT(f.exponent, WithinAbs(-1.5, 0.005));
    }
  }
  SECTION("input validation") {
    CHECK_THROWS_AS(quadrature_linear_energy(RadialProfile::flat(1.0), 0.0, 1.0), RangeError);
    CHECK_THROWS_AS(quadrature_linear_energy(RadialProfile::flat(1.0), 1.0, -1.0), RangeError);
  }
}

TEST_CASE("low-frequency shell integral", "[shell]") {
  const double gamma = 4.0;
  const auto flat = RadialProfile::flat(1.0);

  const ShellIntegral s1 = lemma22_shell_integral(flat, 1.0, gamma, 10.0);
  CHECK(s1.bound_exponent == -1.5);
  CHECK_THAT(s1.value, WithinRel(4.0 * pi / 3.0 * std::pow(gamma / 11.0, 1.5), 1e-12));
  CHECK(lemma22_shell_integral(flat, 2.0, gamma, 10.0).bound_exponent == 0.0);
  CHECK_THAT(lemma22_shell_integral(flat, 4.0 / 3.0, gamma, 10.0).bound_exponent, WithinAbs(-0.75, 1e-15));

  SECTION("value below the bound and non-increasing") {
    for (const auto& p : {flat, RadialProfile::flat(0.5, 0.3), RadialProfile::power(1.0, 0.8),
                          RadialProfile::power(0.0, 2.0)}) {
      for (double q : {1.0, 4.0 / 3.0, 1.7, 2.0}) {
        double prev = 1e300;
        for (double t : geometric(0.01, 1e4, 25)) {
          const ShellIntegral s = lemma22_shell_integral(p, q, gamma, t);
          CHECK(s.value <= s.bound * (1.0 + 1e-10));
          CHECK(s.value <= prev * (1.0 + 1e-14));
          prev = s.value;
        }
      }
    }
  }
  SECTION("bound exponents are realised by the bound") {
    for (double q : {1.0, 4.0 / 3.0, 2.0}) {
      std::vector<std::pair<double, double>> series;
      for (double t : geometric(10.0, 1e4, 30))
        series.emplace_back(t, lemma22_shell_integral(flat, q, gamma, t).bound);
      const DecayFit f = fit_power_law(series, 10.0, 1e4);
      CHECK_THAT(f.exponent, WithinAbs(-1.5 * (2.0 / q - 1.0), 1e-10));
    }
  }
  SECTION("bad arguments") {
    CHECK_THROWS_AS(lemma22_shell_integral(flat, 0.5, gamma, 1.0), RangeError);
    CHECK_THROWS_AS(lemma22_shell_integral(flat, 2.5, gamma, 1.0), RangeError);
    CHECK_THROWS_AS(lemma22_shell_integral(flat, 1.0, 0.0, 1.0), RangeError);
  }
}

TEST_CASE("L^q norms of profiles", "[profile]") {
  CHECK(profile_lq_norm(RadialProfile::flat(1.0), INFINITY) == 1.0);
  CHECK_THAT(profile_lq_norm(RadialProfile::flat(2.0), 2.0), WithinRel(std::sqrt(4.0 * pi * 8.0 / 3.0), 1e-12));
  // Gaussian exp(-r^2/2): ||.||_2^2 = pi^(3/2).
  CHECK_THAT(profile_lq_norm(RadialProfile::power(0.0, std::sqrt(2.0)), 2.0), WithinRel(std::pow(pi, 0.75), 1e-10));
  // r exp(-r^2) peaks at r = 1/sqrt(2).
  CHECK_THAT(profile_lq_norm(RadialProfile::power(1.0, 1.0), INFINITY),
             WithinRel(std::sqrt(0.5) * std::exp(-0.5), 1e-14));
}

TEST_CASE("power-law fitting", "[fit]") {
  std::vector<std::pair<double, double>> exact, constant, scaled;
  for (double t : geometric(0.5, 200.0, 20)) {
    exact.emplace_back(t, std::pow(1.0 + t, -1.5));
    constant.emplace_back(t, 3.0);
    scaled.emplace_back(t, 7.5e-4 * std::pow(1.0 + t, -1.5));
  }
  const DecayFit f = fit_power_law(exact, 0.0, 1e3);
  CHECK_THAT(f.exponent, WithinAbs(-1.5, 1e-12));
  CHECK(f.stderr_exponent < 1e-12);
  CHECK(f.n_samples == 20);
  CHECK_THAT(f.intercept, WithinAbs(0.0, 1e-12));
  CHECK_THAT(fit_power_law(constant, 0.0, 1e3).exponent, WithinAbs(0.0, 1e-14));
  const DecayFit s = fit_power_law(scaled, 0.0, 1e3);
  CHECK_THAT(s.exponent, WithinAbs(f.exponent, 1e-12));
  CHECK_THAT(s.intercept, WithinRel(std::log(7.5e-4), 1e-12));

  const DecayFit w = fit_power_law(exact, 1.0, 10.0);
  CHECK(w.t_lo == 1.0);
  CHECK(w.t_hi == 10.0);
  CHECK(w.n_samples < 20);

  CHECK_THROWS_AS(fit_power_law(exact, 150.0, 200.0), FitError);
  CHECK_THROWS_AS(fit_power_law(exact, 10.0, 1.0), FitError);
  auto with_zero = exact;
  with_zero[3].second = 0.0;
  CHECK_THROWS_WITH(fit_power_law(with_zero, 0.0, 1e3), ContainsSubstring("nonpositive"));
}

TEST_CASE("validity window", "[window]") {
  const Grid ref(64, 2.0 * pi * 10.0);
  const PhysParams params;
  const ValidityWindow w = validity_window(ref, params, 4.0);
  CHECK_THAT(w.t_hi, WithinRel(25.0, 1e-12));
  const double kq = 21.0 * std::sqrt(3.0) * 0.1 / 4.0;
  CHECK_THAT(w.t_lo, WithinRel(4.0 / (kq * kq) - 1.0, 1e-12));

  const ValidityWindow big = validity_window(Grid(64, 2.0 * pi * 20.0), params, 4.0);
  CHECK_THAT(big.t_hi, WithinRel(100.0, 1e-12));

  CHECK(validity_window(ref, params, 4.0, 10.0).t_lo == 10.0);
  CHECK_THAT(validity_window(ref, params, 4.0, 0.0, 0.5).t_hi, WithinRel(50.0, 1e-12));

  CHECK_THROWS_WITH(validity_window(Grid(8, 2.0 * pi * 10.0), params, 4.0),
                    ContainsSubstring("n_points >="));
}

TEST_CASE("lattice energy matches the continuous integral in the window", "[lattice]") {
  const Grid g(64, 2.0 * pi * 10.0);
  const PhysParams params;
  SpectrumProfile p;
  p.cutoff_k = 1.0;
  p.target_l2_norm = 0.05;
  State s0 = State::zeros(g);
  s0.u = make_divfree_random_field(g, p);

  // Per-mode modulus is A * exp(-(|k|/c)^2); recover A from one mode.
  double m = 0.0;
  for (const auto& c : s0.u) m += std::norm(c.mode(1, 0, 0));
  const double a_sq = m / std::pow(p.envelope(g, 1, 0, 0), 2);
  const double to_continuum = g.volume() * a_sq / std::pow(g.k_min(), 3);

  // The lattice sum is a spectrally accurate Riemann sum of the continuum
  // integral, short of the k = 0 term that a mean-free field lacks. Its
  // aliasing error exp(-2 pi^2 sigma^2 / k_min^2) reaches ~1e-8 at t_hi.
  const ValidityWindow w = validity_window(g, params, 4.0);
  std::vector<std::pair<double, double>> series;
  for (double t : geometric(w.t_lo, w.t_hi, 12)) {
    const double lattice = lattice_linear_energy(s0, params, t);
    const double continuum = to_continuum * quadrature_linear_energy(RadialProfile::power(0.0, 1.0), 1.0, t);
    CHECK_THAT(lattice + g.volume() * a_sq, WithinRel(continuum, 1e-7));
    series.emplace_back(t, lattice);
  }
  CHECK_THAT(fit_power_law(series, w.t_lo, w.t_hi).exponent, WithinAbs(-1.5, 0.1));
  CHECK_THAT(lattice_linear_energy(s0, params, 0.0), WithinRel(l2_norm_sq(s0.u), 1e-12));
  double grad = 0.0;
  for (const auto& c : s0.u) grad += sobolev_seminorm_sq(c, 1.0);
  CHECK_THAT(lattice_linear_energy(s0, params, 0.0, 1), WithinRel(grad, 1e-12));
}
