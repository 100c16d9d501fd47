#include "oldroyd/diagnostics.hpp"

#include <algorithm>
#include <string>

#include "oldroyd/error.hpp"

namespace oldroyd {

namespace {

using Eigen::ArrayXd;

ArrayXd modulus_sq(const VectorField& v) {
  return v[0].coeffs.abs2() + v[1].coeffs.abs2() + v[2].coeffs.abs2();
}

ArrayXd modulus_sq(const TensorField& f) {
  ArrayXd out = ArrayXd::Zero(f[0].coeffs.size());
  for (const auto& c : f) out += c.coeffs.abs2();
  return out;
}

}  // namespace

TimeSeriesRecord record(const State& state, const PhysParams& params,
                        const SplittingSchedule& schedule, const State& initial_state,
                        int m_order) {
  state.check_grid();
  initial_state.check_grid();
  if (state.grid() != initial_state.grid()) {
    throw GridMismatch("state and initial state live on different grids");
  }
  if (m_order < 0) throw RangeError("m_order must be nonnegative");

  const Grid& g = state.grid();
  const auto& t = tables(g);
  const double vol = g.volume();
  const ArrayXd u_sq = modulus_sq(state.u);
  const ArrayXd f_sq = modulus_sq(state.f);

  TimeSeriesRecord r;
  r.time = state.time;
  r.l2_u_sq = vol * (t.weight * u_sq).sum();
  r.l2_f_sq = vol * (t.weight * f_sq).sum();
  r.hm_sq.resize(static_cast<std::size_t>(m_order) + 1);
  r.hm_sq[0] = r.l2_u_sq + r.l2_f_sq;
  for (int j = 1; j <= m_order; ++j) {
    r.hm_sq[static_cast<std::size_t>(j)] =
        vol * (t.weight * t.k_sq.pow(static_cast<double>(j)) * (u_sq + f_sq)).sum();
  }
  r.dissipation_u = 2.0 * params.mu * vol * (t.weight * t.k_sq * u_sq).sum();
  r.damping_f = 2.0 * params.nu * r.l2_f_sq;

  const double radius = schedule.radius(state.time);
  const ArrayXd inside = (t.k_sq <= radius * radius).cast<double>();
  r.shell_mass_u = vol * (t.weight * inside * u_sq).sum();
  r.shell_mass_f = vol * (t.weight * inside * f_sq).sum();

  const ArrayXd k_abs = t.k_sq.sqrt();
  const ArrayXd u_now = u_sq.sqrt();
  const ArrayXd u_init = modulus_sq(initial_state.u).sqrt();
  const ArrayXd f_now = f_sq.sqrt();
  const ArrayXd f_init = modulus_sq(initial_state.f).sqrt();

  double ru = 0.0, rf = 0.0;
  for (Eigen::Index i = 0; i < k_abs.size(); ++i) {
    if (k_abs[i] > 0.0) {
      ru = std::max(ru, u_now[i] / (u_init[i] + 1.0 / k_abs[i]));
      rf = std::max(rf, f_now[i] / (f_init[i] + k_abs[i]));
    } else if (f_init[i] > 0.0) {
      rf = std::max(rf, f_now[i] / f_init[i]);
    }
  }
  r.ratio_u = ru;
  r.ratio_f = rf;
  return r;
}

std::vector<double> finite_difference_weights(double x0, const std::vector<double>& nodes,
                                              int order) {
  const int n = static_cast<int>(nodes.size());
  if (order < 0 || order >= n) throw RangeError("stencil too small for derivative order");
  // c[j][k]: weight of node j for the k-th derivative.
  std::vector<std::vector<double>> c(static_cast<std::size_t>(n),
                                     std::vector<double>(static_cast<std::size_t>(order) + 1, 0.0));
  double c1 = 1.0;
  double c4 = nodes[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[static_cast<std::size_t>(i)] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = nodes[static_cast<std::size_t>(i)] - nodes[static_cast<std::size_t>(j)];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        }
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) w[static_cast<std::size_t>(j)] = c[j][order];
  return w;
}

namespace {

int half_width(DerivativeStencil s) { return s == DerivativeStencil::three_point ? 1 : 2; }

void check_series(const std::vector<TimeSeriesRecord>& records, DerivativeStencil stencil) {
  const std::size_t need = 2 * static_cast<std::size_t>(half_width(stencil)) + 1;
  if (records.size() < need) {
    throw RangeError("energy identity residual needs at least " + std::to_string(need) +
                     " records, got " + std::to_string(records.size()));
  }
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (!(records[i].time > records[i - 1].time)) {
      throw RangeError("records must have strictly increasing times");
    }
  }
}

}  // namespace

std::vector<double> energy_identity_residual(const std::vector<TimeSeriesRecord>& records,
                                             DerivativeStencil stencil) {
  check_series(records, stencil);
  const int hw = half_width(stencil);
  std::vector<double> out;
  const auto n = static_cast<int>(records.size());
  for (int i = hw; i < n - hw; ++i) {
    std::vector<double> nodes;
    for (int j = i - hw; j <= i + hw; ++j) nodes.push_back(records[static_cast<std::size_t>(j)].time);
    const auto w = finite_difference_weights(records[static_cast<std::size_t>(i)].time, nodes, 1);
    double de_dt = 0.0;
    for (int j = i - hw; j <= i + hw; ++j) {
      const auto& r = records[static_cast<std::size_t>(j)];
      de_dt += w[static_cast<std::size_t>(j - (i - hw))] * (r.l2_u_sq + r.l2_f_sq);
    }
    const auto& r = records[static_cast<std::size_t>(i)];
    out.push_back(de_dt + r.damping_f + r.dissipation_u);
  }
  return out;
}

std::vector<double> energy_identity_times(const std::vector<TimeSeriesRecord>& records,
                                          DerivativeStencil stencil) {
  check_series(records, stencil);
  const int hw = half_width(stencil);
  std::vector<double> out;
  for (std::size_t i = static_cast<std::size_t>(hw); i + static_cast<std::size_t>(hw) < records.size();
       ++i) {
    out.push_back(records[i].time);
  }
  return out;
}

double hm_monotonicity_violation(const std::vector<TimeSeriesRecord>& records, int m_order) {
  if (records.empty()) return 0.0;
  auto total = [&](const TimeSeriesRecord& r) {
    if (r.hm_sq.size() <= static_cast<std::size_t>(m_order)) {
      throw RangeError("record at t = " + std::to_string(r.time) + " lacks order " +
                       std::to_string(m_order));
    }
    double s = 0.0;
    for (int j = 0; j <= m_order; ++j) s += r.hm_sq[static_cast<std::size_t>(j)];
    return s;
  };
  const double initial = total(records.front());
  double worst = 0.0;
  double prev = initial;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const double cur = total(records[i]);
    worst = std::max(worst, cur - prev);
    prev = cur;
  }
  return initial > 0.0 ? worst / initial : 0.0;
}

Lemma41Constants lemma41_constants(const std::vector<TimeSeriesRecord>& records) {
  Lemma41Constants c;
  for (const auto& r : records) {
    c.c_u = std::max(c.c_u, r.ratio_u);
    c.c_f = std::max(c.c_f, r.ratio_f);
  }
  return c;
}

}  // namespace oldroyd
