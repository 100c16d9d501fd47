#include "oldroyd/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "oldroyd/error.hpp"

namespace oldroyd {

void StepControl::validate() const {
  if (!(dt > 0.0)) throw RangeError("control.dt must be positive");
  if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) {
    throw RangeError("control.cfl_safety must lie in (0, 1]");
  }
  if (max_steps <= 0) throw RangeError("control.max_steps must be positive");
  if (nan_check_interval <= 0) throw RangeError("control.nan_check_interval must be positive");
  if (!(dt_cap > 0.0)) throw RangeError("control.dt_cap must be positive");
}

namespace {

using Eigen::ArrayXd;

// Exact linear propagators over a time h.
struct Factors {
  ArrayXd u;  // exp(-mu |k|^2 h)
  double f;   // exp(-nu h)
};

Factors factors(const Grid& g, const PhysParams& p, double h) {
  return {(-p.mu * h * tables(g).k_sq).exp(), std::exp(-p.nu * h)};
}

Eigen::ArrayXcd& component(State& s, int c) { return c < 3 ? s.u[c].coeffs : s.f[c - 3].coeffs; }
const Eigen::ArrayXcd& component(const State& s, int c) {
  return c < 3 ? s.u[c].coeffs : s.f[c - 3].coeffs;
}
const Eigen::ArrayXcd& component(const Tendency& k, int c) {
  return c < 3 ? k.du[c].coeffs : k.df[c - 3].coeffs;
}

// Same grid and time as y, coefficients left for the caller to fill.
State uninitialized_like(const State& y) {
  const Grid& g = y.grid();
  const auto size = static_cast<Eigen::Index>(g.spectral_size());
  auto field = [&] { return SpectralField(g, Eigen::ArrayXcd(size)); };
  return State{y.time,
               {field(), field(), field()},
               {field(), field(), field(), field(), field(), field(), field(), field(), field()}};
}

// Calls body(c, e_half, e_full) for the 12 components, where the factors are
// the u arrays for c < 3 and the scalar F damping otherwise. Each stage of
// the step is then one fused pass per component.
template <class Body>
void for_each_component(const Factors& half, const Factors& full, Body body) {
  for (int c = 0; c < 3; ++c) body(c, half.u, full.u);
  for (int c = 3; c < 12; ++c) body(c, half.f, full.f);
}

const char* first_nonfinite(const State& s) {
  static const char* u_names[] = {"u1", "u2", "u3"};
  static const char* f_names[] = {"F11", "F12", "F13", "F21", "F22",
                                  "F23", "F31", "F32", "F33"};
  for (int i = 0; i < 3; ++i)
    if (!s.u[i].coeffs.allFinite()) return u_names[i];
  for (int m = 0; m < 9; ++m)
    if (!s.f[m].coeffs.allFinite()) return f_names[m];
  return nullptr;
}

State step_impl(const State& y, const PhysParams& params, double h, bool nonlinear, bool check) {
  const Grid& g = y.grid();
  const Factors half = factors(g, params, 0.5 * h);
  const Factors full = factors(g, params, h);

  State next = uninitialized_like(y);
  if (!nonlinear) {
    for_each_component(half, full, [&](int c, const auto&, const auto& ef) {
      component(next, c) = ef * component(y, c);
    });
  } else {
    // Lawson RK4 in the variable v = E(-t) y:
    //   k1 = N(y)
    //   k2 = N(E_h/2 (y + h/2 k1))
    //   k3 = N(E_h/2 y + h/2 k2)
    //   k4 = N(E_h y + h E_h/2 k3)
    //   y+ = E_h (y + h/6 k1) + h/3 E_h/2 (k2 + k3) + h/6 k4
    State stage = uninitialized_like(y);
    const Tendency k1 = compute_rhs(y, params, true);
    for_each_component(half, full, [&](int c, const auto& eh, const auto&) {
      component(stage, c) = eh * (component(y, c) + (0.5 * h) * component(k1, c));
    });
    const Tendency k2 = compute_rhs(stage, params, true);
    for_each_component(half, full, [&](int c, const auto& eh, const auto&) {
      component(stage, c) = eh * component(y, c) + (0.5 * h) * component(k2, c);
    });
    const Tendency k3 = compute_rhs(stage, params, true);
    for_each_component(half, full, [&](int c, const auto& eh, const auto& ef) {
      component(stage, c) = ef * component(y, c) + h * (eh * component(k3, c));
    });
    const Tendency k4 = compute_rhs(stage, params, true);
    for_each_component(half, full, [&](int c, const auto& eh, const auto& ef) {
      component(next, c) = ef * (component(y, c) + (h / 6.0) * component(k1, c)) +
                           (h / 3.0) * (eh * (component(k2, c) + component(k3, c))) +
                           (h / 6.0) * component(k4, c);
    });
  }
  next.time = y.time + h;

  if (check) {
    if (const char* bad = first_nonfinite(next)) {
      throw BlowUpError(std::string("non-finite coefficients in ") + bad + " at t = " +
                            std::to_string(next.time),
                        -1, next.time, bad);
    }
  }
  return next;
}

}  // namespace

State step(const State& state, const PhysParams& params, double dt, bool include_nonlinear) {
  if (!(dt > 0.0)) throw RangeError("step size must be positive");
  params.validate();
  state.check_grid();
  try {
    return step_impl(state, params, dt, include_nonlinear, true);
  } catch (const BlowUpError& e) {
    throw BlowUpError(e.what(), e.step(), state.time + dt, e.field());
  }
}

double suggest_dt(const State& state, const PhysParams& params, const StepControl& control) {
  params.validate();
  control.validate();
  const Grid& g = state.grid();
  const auto npts = static_cast<Eigen::Index>(g.physical_size());

  ArrayXd speed_sq = ArrayXd::Zero(npts);
  for (const auto& c : state.u) speed_sq += transform_inverse(c).square();
  ArrayXd f_sq = ArrayXd::Zero(npts);
  for (const auto& c : state.f) f_sq += transform_inverse(c).square();
  const double speed = std::sqrt(speed_sq.maxCoeff()) + std::sqrt(f_sq.maxCoeff());

  constexpr double tiny = 1e-300;
  const double advective = control.cfl_safety * g.spacing() / (speed + tiny);
  return std::min({control.dt, control.dt_cap, advective});
}

State evolve(State state, const PhysParams& params, const StepControl& control, double t_end,
             const std::vector<double>& sample_times, const SampleSink& sink,
             bool include_nonlinear) {
  params.validate();
  control.validate();
  state.check_grid();
  if (t_end < state.time) throw RangeError("t_end lies before the current state time");
  if (!std::is_sorted(sample_times.begin(), sample_times.end())) {
    throw RangeError("sample times must be sorted");
  }

  auto next_sample = std::lower_bound(sample_times.begin(), sample_times.end(), state.time);
  auto emit_due = [&] {
    while (next_sample != sample_times.end() && *next_sample <= state.time &&
           *next_sample <= t_end) {
      if (sink) sink(state);
      // Duplicate sample times produce a single callback.
      const double t = *next_sample;
      while (next_sample != sample_times.end() && *next_sample == t) ++next_sample;
    }
  };
  emit_due();

  long steps = 0;
  while (state.time < t_end) {
    double target = t_end;
    if (next_sample != sample_times.end() && *next_sample < target) target = *next_sample;

    double h = control.dt;
    bool lands = false;
    // Avoid slivers: a step that would stop within 1e-9 dt of the target ends on it.
    if (state.time + h >= target - 1e-9 * control.dt) {
      h = target - state.time;
      lands = true;
    }
    if (++steps > control.max_steps) {
      throw RangeError("control.max_steps exceeded at t = " + std::to_string(state.time));
    }
    const bool check = steps % control.nan_check_interval == 0 || lands;
    try {
      state = step_impl(state, params, h, include_nonlinear, check);
    } catch (const BlowUpError& e) {
      throw BlowUpError(std::string(e.what()) + " (step " + std::to_string(steps) + ")", steps,
                        state.time + h, e.field());
    }
    if (lands) state.time = target;
    emit_due();
  }
  return state;
}

}  // namespace oldroyd
