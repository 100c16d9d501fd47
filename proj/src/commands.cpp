#include "oldroyd/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "oldroyd/decay.hpp"
#include "oldroyd/diagnostics.hpp"
#include "oldroyd/error.hpp"
#include "oldroyd/integrator.hpp"
#include "oldroyd/io.hpp"

namespace oldroyd {

namespace {

std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open CSV for writing: " + path);
  return out;
}

std::string join(const std::vector<std::string>& cells) {
  std::string s;
  for (const auto& c : cells) s += (s.empty() ? "" : ",") + c;
  return s;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void print_fit(std::ostream& log, const std::string& label, const DecayFit& f) {
  log << label << ": exponent " << fmt(f.exponent) << " stderr " << fmt(f.stderr_exponent)
      << " window [" << f.t_lo << ", " << f.t_hi << "] samples " << f.n_samples << '\n';
}

}  // namespace

int cmd_run(const RunConfig& config, std::ostream& log,
            const std::optional<std::string>& resume_from) {
  config.validate();
  const Grid grid = config.make_grid();
  const State initial = make_initial_state(grid, config.u_profile(), config.f_profile());

  State start = initial;
  if (resume_from) {
    Checkpoint cp = checkpoint_read(*resume_from);
    if (cp.state.grid() != grid) {
      throw GridMismatch("checkpoint grid differs from the configured grid");
    }
    if (!(cp.params == config.params)) {
      throw ConfigError("checkpoint mu/nu differ from the configured params");
    }
    start = std::move(cp.state);
    log << "resuming from " << *resume_from << " at t = " << fmt(start.time) << '\n';
  }

  const SplittingSchedule schedule{config.gamma};
  const std::vector<double> times = config.sample_times();
  std::ofstream csv = open_csv(config.outputs.csv);
  csv << join(csv_header(config.m_order)) << '\n';

  // Sample index in the full schedule, so checkpoint cadence survives a resume.
  std::size_t sample_index =
      static_cast<std::size_t>(std::lower_bound(times.begin(), times.end(), start.time) -
                               times.begin());
  const bool checkpoints = !config.outputs.checkpoint.empty();
  const auto interval = static_cast<std::size_t>(config.outputs.checkpoint_interval);

  auto sink = [&](const State& s) {
    csv << csv_row(record(s, config.params, schedule, initial, config.m_order)) << '\n';
    if (!csv) throw IoError("failed writing " + config.outputs.csv);
    if (checkpoints && interval > 0 && sample_index > 0 && sample_index % interval == 0) {
      checkpoint_write(s, config.params, config.outputs.checkpoint);
    }
    ++sample_index;
  };

  try {
    const State final_state =
        evolve(start, config.params, config.control, times.back(), times, sink);
    if (checkpoints) checkpoint_write(final_state, config.params, config.outputs.checkpoint);
  } catch (const BlowUpError& e) {
    csv.flush();
    log << "blow-up at t = " << fmt(e.time()) << " (step " << e.step() << ", field "
        << e.field() << "): " << e.what() << '\n';
    return exit_blow_up;
  }
  csv.flush();
  log << "wrote " << sample_index << " samples to " << config.outputs.csv << '\n';
  return exit_ok;
}

int cmd_oracle(const RunConfig& config, std::ostream& log) {
  config.validate();
  const RadialProfile profile = config.radial_profile();
  const double mu = config.params.mu;
  const std::vector<double> p_values{1.0, 4.0 / 3.0, 2.0};
  const std::vector<std::string> p_labels{"p1", "p4_3", "p2"};

  std::vector<double> times;
  for (double t : config.sample_times())
    if (t > 0.0) times.push_back(t);

  std::vector<std::string> header{"time", "energy_quadrature", "energy_closed_form"};
  for (const auto& l : p_labels) {
    header.push_back("shell_" + l);
    header.push_back("shell_bound_" + l);
  }
  std::ofstream csv = open_csv(config.outputs.csv);
  csv << join(header) << '\n';

  std::vector<std::pair<double, double>> energy;
  std::vector<std::vector<std::pair<double, double>>> shell(p_values.size()),
      bound(p_values.size());
  for (double t : times) {
    const double e = quadrature_linear_energy(profile, mu, t);
    energy.emplace_back(t, e);
    std::vector<std::string> row{fmt(t), fmt(e), fmt(closed_form_linear_energy(profile, mu, t))};
    for (std::size_t i = 0; i < p_values.size(); ++i) {
      const ShellIntegral s = lemma22_shell_integral(profile, p_values[i], config.gamma, t);
      shell[i].emplace_back(t, s.value);
      bound[i].emplace_back(t, s.bound);
      row.push_back(fmt(s.value));
      row.push_back(fmt(s.bound));
    }
    csv << join(row) << '\n';
  }
  if (!csv) throw IoError("failed writing " + config.outputs.csv);

  const double t_lo = times.front(), t_hi = times.back();
  print_fit(log, "energy", fit_power_law(energy, t_lo, t_hi));
  for (std::size_t i = 0; i < p_values.size(); ++i) {
    const ShellIntegral s = lemma22_shell_integral(profile, p_values[i], config.gamma, t_hi);
    print_fit(log, "shell_bound_" + p_labels[i], fit_power_law(bound[i], t_lo, t_hi));
    log << "  predicted exponent " << fmt(s.bound_exponent) << '\n';
    print_fit(log, "shell_" + p_labels[i], fit_power_law(shell[i], t_lo, t_hi));
  }
  return exit_ok;
}

int cmd_fit(const std::string& csv_path, const std::string& column, double t_lo, double t_hi,
            std::ostream& log) {
  const CsvTable table = read_csv(csv_path);
  const auto t = table.column("time");
  const auto v = table.column(column);
  std::vector<std::pair<double, double>> series;
  for (std::size_t i = 0; i < t.size(); ++i) series.emplace_back(t[i], v[i]);
  print_fit(log, column, fit_power_law(series, t_lo, t_hi));
  return exit_ok;
}

int cmd_check(const std::string& checkpoint_path, std::ostream& log) {
  const Checkpoint cp = checkpoint_read(checkpoint_path);
  const State& s = cp.state;
  bool ok = true;
  auto report = [&](const std::string& name, double value, double limit) {
    const bool pass = std::isfinite(value) && value <= limit;
    ok = ok && pass;
    log << (pass ? "PASS " : "FAIL ") << name << " = " << fmt(value) << " (limit " << limit
        << ")\n";
  };

  log << "checkpoint t = " << fmt(s.time) << ", n = " << s.grid().n() << ", L = "
      << fmt(s.grid().box_length()) << ", mu = " << fmt(cp.params.mu) << ", nu = "
      << fmt(cp.params.nu) << '\n';

  double symmetry = 0.0, leak = 0.0, scale = 0.0;
  bool finite = true;
  const auto& mask = tables(s.grid()).dealias_mask;
  auto scan = [&](const SpectralField& f) {
    finite = finite && f.coeffs.allFinite();
    symmetry = std::max(symmetry, hermitian_defect(f));
    scale = std::max(scale, max_abs(f));
    leak = std::max(leak, ((1.0 - mask) * f.coeffs.abs()).maxCoeff());
  };
  for (const auto& c : s.u) scan(c);
  for (const auto& c : s.f) scan(c);

  report("non-finite coefficients", finite ? 0.0 : 1.0, 0.0);
  report("hermitian defect", symmetry, 1e-8);
  report("dealias leak", scale > 0.0 ? leak / scale : 0.0, 1e-12);
  const DivergenceResiduals div = divergence_residuals(s);
  report("div u residual", div.u, 1e-10);
  report("div F^T residual", div.f_columns, 1e-8);
  const CancellationDefects cancel = energy_cancellations(s);
  report("advection cancellation (u)", cancel.advection_u, 1e-10);
  report("advection cancellation (F)", cancel.advection_f, 1e-10);
  report("exchange cancellation", cancel.exchange, 1e-10);
  return ok ? exit_ok : exit_check_failed;
}

}  // namespace oldroyd
