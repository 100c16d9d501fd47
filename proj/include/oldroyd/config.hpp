#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oldroyd/decay.hpp"
#include "oldroyd/integrator.hpp"
#include "oldroyd/oldroyd_system.hpp"

namespace oldroyd {

enum class SampleSpacing { geometric, linear };

struct RunConfig {
  struct GridSection {
    int n_points = 32;
    double box_length = 20.0 * 3.14159265358979323846;

    bool operator==(const GridSection&) const = default;
  } grid;

  PhysParams params;

  struct InitialSection {
    SpectrumProfile::Shape profile = SpectrumProfile::Shape::flat_low_k_gaussian_cutoff;
    double cutoff_k = 1.0;
    double amplitude_u = 0.05;
    double amplitude_f = 0.05;
    std::uint64_t seed = 1;

    bool operator==(const InitialSection&) const = default;
  } initial;

  StepControl control;

  double gamma = 4.0;

  struct OutputSection {
    SampleSpacing spacing = SampleSpacing::geometric;
    double t_first = 0.01;
    double t_end = 25.0;
    int sample_count = 200;
    std::string csv = "run.csv";
    std::string checkpoint;  // empty: no checkpoints
    int checkpoint_interval = 0;  // in samples, 0: off

    bool operator==(const OutputSection&) const = default;
  } outputs;

  struct WindowSection {
    double transient_skip = 0.0;
    double c_win = 0.25;

    bool operator==(const WindowSection&) const = default;
  } window;

  int m_order = 3;

  // Whole-space radial profile used by `oracle`.
  struct OracleSection {
    RadialProfile::Kind profile = RadialProfile::Kind::flat_then_gaussian;
    double cutoff = 1.0;
    double width = 0.0;
    double power = 0.0;

    bool operator==(const OracleSection&) const = default;
  } oracle;

  void validate() const;
  Grid make_grid() const;
  SpectrumProfile u_profile() const;
  SpectrumProfile f_profile() const;
  RadialProfile radial_profile() const;

  /// t = 0 followed by sample_count times: geometric t_first * rho^k or
  /// linear, both ending exactly at t_end.
  std::vector<double> sample_times() const;

  bool operator==(const RunConfig&) const = default;
};

/// Parses a YAML document with sections grid, params, initial, control,
/// schedule, outputs, window, oracle and the scalar m_order. Omitted fields
/// keep their defaults; unknown keys raise ConfigError; out-of-range values
/// raise RangeError naming the field.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& config);

}  // namespace oldroyd
