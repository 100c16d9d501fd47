#pragma once

#include <functional>
#include <vector>

#include "oldroyd/oldroyd_system.hpp"

namespace oldroyd {

struct StepControl {
  double dt = 0.01;
  double cfl_safety = 1.0;
  long max_steps = 10'000'000;
  long nan_check_interval = 1;
  /// Ceiling applied by suggest_dt regardless of the flow speed.
  double dt_cap = 1.0;

  void validate() const;
  bool operator==(const StepControl&) const = default;
};

/// One integrating-factor RK4 step (Lawson form). The linear parts are
/// propagated with the exact factors exp(-mu |k|^2 h) and exp(-nu h), so with
/// include_nonlinear off the update is exact per mode.
State step(const State& state, const PhysParams& params, double dt, bool include_nonlinear);

/// Advisory step: min(control.dt, dt_cap, cfl_safety * dx / (max|u| + max|F| + tiny)).
double suggest_dt(const State& state, const PhysParams& params, const StepControl& control);

using SampleSink = std::function<void(const State&)>;

/// Steps with control.dt, shortening the last substep before each sample time
/// and before t_end so that samples land exactly. The sink is called once per
/// sample time in [state.time, t_end]; samples before state.time are skipped.
State evolve(State state, const PhysParams& params, const StepControl& control, double t_end,
             const std::vector<double>& sample_times, const SampleSink& sink,
             bool include_nonlinear = true);

}  // namespace oldroyd
