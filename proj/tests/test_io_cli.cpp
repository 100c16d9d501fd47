#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>
#include <sstream>
#include <string>

#include "oldroyd/commands.hpp"
#include "oldroyd/config.hpp"
#include "oldroyd/error.hpp"
#include "oldroyd/integrator.hpp"
#include "oldroyd/io.hpp"
#include "support.hpp"

using namespace oldroyd;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "oldroyd_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::string> lines(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

RunConfig small_config(const std::string& tag) {
  RunConfig c;
  c.grid.n_points = 8;
  c.grid.box_length = 2.0 * std::numbers::pi * 2.0;
  c.control.dt = 0.05;
  c.outputs.t_first = 0.05;
  c.outputs.t_end = 1.0;
  c.outputs.sample_count = 12;
  c.outputs.csv = scratch(tag + ".csv").string();
  c.initial.amplitude_u = 0.5;
  c.initial.amplitude_f = 0.5;
  return c;
}

int run_cli(const std::string& args, const fs::path& out) {
  const std::string cmd = std::string(OLDROYD_CLI) + " " + args + " > " + out.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config parsing", "[config]") {
  SECTION("empty document gives the defaults") {
    CHECK(parse_config("") == RunConfig{});
    const RunConfig c = parse_config("");
    CHECK(c.grid.n_points == 32);
    CHECK(c.params.mu == 1.0);
    CHECK(c.m_order == 3);
  }
  SECTION("nested sections") {
    const RunConfig c = parse_config(R"(
grid:
  n_points: 16
  box_length: 12.5
params:
  mu: 0.5
  nu: 0
initial:
  profile: ring
  seed: 99
outputs:
  samples: linear
  sample_count: 5
  t_end: 2
m_order: 4
)");
    CHECK(c.grid.n_points == 16);
    CHECK(c.grid.box_length == 12.5);
    CHECK(c.params.nu == 0.0);
    CHECK(c.initial.profile == SpectrumProfile::Shape::ring);
    CHECK(c.initial.seed == 99);
    CHECK(c.m_order == 4);
    CHECK(c.sample_times() == std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0});
  }
  SECTION("errors name the offending field") {
    CHECK_THROWS_AS(parse_config("params:\n  nu: -1\n"), RangeError);
    CHECK_THROWS_WITH(parse_config("params:\n  nu: -1\n"), ContainsSubstring("params.nu"));
    CHECK_THROWS_WITH(parse_config("grid:\n  n_points: 4\n"), ContainsSubstring("grid.n_points"));
    CHECK_THROWS_AS(parse_config("grid:\n  nonsense: 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("bogus: 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("initial:\n  profile: spiral\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("grid:\n  n_points: many\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("m_order: 2\n"), RangeError);
    CHECK_THROWS_AS(load_config(scratch("missing.yaml").string()), IoError);
  }
  SECTION("serialization round trips") {
    RunConfig c;
    c.grid.box_length = 1.0 / 3.0;
    c.params.mu = 0.1;
    c.initial.profile = SpectrumProfile::Shape::single_mode;
    c.outputs.checkpoint = "state.bin";
    c.outputs.checkpoint_interval = 7;
    c.oracle.profile = RadialProfile::Kind::power;
    c.oracle.power = 0.5;
    CHECK(parse_config(serialize_config(c)) == c);
  }
  SECTION("geometric schedule") {
    RunConfig c;
    c.outputs.t_first = 0.1;
    c.outputs.t_end = 100.0;
    c.outputs.sample_count = 5;
    const auto t = c.sample_times();
    REQUIRE(t.size() == 5);
    CHECK(t[0] == 0.0);
    CHECK(t[1] == 0.1);
    CHECK_THAT(t[2], WithinAbs(1.0, 1e-13));
    CHECK(t[4] == 100.0);
  }
}

TEST_CASE("checkpoints", "[checkpoint]") {
  const Grid g(12, 3.5);
  State s = test_support::random_state(g, 21);
  s.time = 1.25;
  const PhysParams params{0.3, 0.7};
  const auto path = scratch("round.bin");
  checkpoint_write(s, params, path.string());

  SECTION("round trip is bitwise") {
    const Checkpoint cp = checkpoint_read(path.string());
    CHECK(cp.params == params);
    CHECK(cp.state.time == 1.25);
    CHECK(cp.state.grid() == g);
    for (int i = 0; i < 3; ++i) CHECK((cp.state.u[i].coeffs == s.u[i].coeffs).all());
    for (int m = 0; m < 9; ++m) CHECK((cp.state.f[m].coeffs == s.f[m].coeffs).all());
  }
  SECTION("layout") {
    const std::string bytes = slurp(path);
    CHECK(bytes.size() == 44 + 12 * 12 * 12 * 12 * 16);
    CHECK(bytes.substr(0, 4) == "OLD1");
    CHECK(bytes[4] == 1);
    CHECK(bytes[8] == 12);
  }
  SECTION("corruption is detected") {
    const std::string bytes = slurp(path);
    auto write = [](const fs::path& p, const std::string& b) {
      std::ofstream(p, std::ios::binary) << b;
    };
    write(scratch("short.bin"), bytes.substr(0, bytes.size() - 8));
    CHECK_THROWS_AS(checkpoint_read(scratch("short.bin").string()), IoError);
    write(scratch("long.bin"), bytes + "x");
    CHECK_THROWS_AS(checkpoint_read(scratch("long.bin").string()), IoError);
    write(scratch("magic.bin"), "OLD2" + bytes.substr(4));
    CHECK_THROWS_AS(checkpoint_read(scratch("magic.bin").string()), IoError);
    // Perturb the real part of the mode at lattice index 1 of u1.
    std::string skew = bytes;
    const std::size_t at = 44 + 16;
    skew[at + 7] ^= 0x10;
    write(scratch("skew.bin"), skew);
    CHECK_THROWS_AS(checkpoint_read(scratch("skew.bin").string()), SymmetryError);
    CHECK_THROWS_AS(checkpoint_read(scratch("absent.bin").string()), IoError);
  }
}

TEST_CASE("CSV output", "[csv]") {
  CHECK(csv_header(3) == std::vector<std::string>{"time", "l2_u_sq", "l2_F_sq", "hm_sq[0]", "hm_sq[1]",
                                                  "hm_sq[2]", "hm_sq[3]", "dissipation_u", "damping_F",
                                                  "shell_mass_u", "shell_mass_F", "ratio_u", "ratio_F"});
  TimeSeriesRecord r;
  r.time = 0.1;
  r.hm_sq = {1.0 / 3.0, 2.0};
  const std::string row = csv_row(r);
  CHECK_THAT(row, ContainsSubstring("0.10000000000000001,"));
  CHECK_THAT(row, ContainsSubstring("0.33333333333333331,"));

  const auto path = scratch("table.csv");
  std::ofstream(path) << "time,value\n0,1\n1,0.5\n";
  const CsvTable t = read_csv(path.string());
  CHECK(t.column("value") == std::vector<double>{1.0, 0.5});
  CHECK_THROWS_WITH(t.column("nope"), ContainsSubstring("value"));
  CHECK_THROWS_AS(read_csv(scratch("absent.csv").string()), IoError);
}

TEST_CASE("run command", "[run]") {
  std::ostringstream log;

  SECTION("zero data stays zero") {
    RunConfig c = small_config("zero");
    c.initial.amplitude_u = c.initial.amplitude_f = 0.0;
    REQUIRE(cmd_run(c, log) == exit_ok);
    const CsvTable t = read_csv(c.outputs.csv);
    CHECK(t.rows.size() == 12);
    for (const auto& row : t.rows)
      for (std::size_t j = 1; j < row.size(); ++j) CHECK(row[j] == 0.0);
  }
  SECTION("runs are deterministic") {
    RunConfig a = small_config("det_a"), b = small_config("det_b");
    REQUIRE(cmd_run(a, log) == exit_ok);
    REQUIRE(cmd_run(b, log) == exit_ok);
    CHECK(slurp(a.outputs.csv) == slurp(b.outputs.csv));
    b.initial.seed = 2;
    REQUIRE(cmd_run(b, log) == exit_ok);
    CHECK(slurp(a.outputs.csv) != slurp(b.outputs.csv));
  }
  SECTION("resume reproduces the tail of a full run") {
    RunConfig full = small_config("full");
    REQUIRE(cmd_run(full, log) == exit_ok);
    const auto times = full.sample_times();

    // Checkpoint at the sixth sample by evolving the same initial data.
    const State initial = make_initial_state(full.make_grid(), full.u_profile(), full.f_profile());
    const std::vector<double> head(times.begin(), times.begin() + 6);
    const State mid = evolve(initial, full.params, full.control, times[5], head, [](const State&) {});
    const auto cp = scratch("mid.bin");
    checkpoint_write(mid, full.params, cp.string());

    RunConfig resumed = small_config("resumed");
    REQUIRE(cmd_run(resumed, log, cp.string()) == exit_ok);
    const auto a = lines(full.outputs.csv), b = lines(resumed.outputs.csv);
    REQUIRE(b.size() == a.size() - 5);
    CHECK(b[0] == a[0]);
    for (std::size_t i = 1; i < b.size(); ++i) CHECK(b[i] == a[i + 5]);

    resumed.params.mu = 2.0;
    CHECK_THROWS_AS(cmd_run(resumed, log, cp.string()), ConfigError);
    resumed = small_config("resumed");
    resumed.grid.n_points = 10;
    CHECK_THROWS_AS(cmd_run(resumed, log, cp.string()), GridMismatch);
  }
  SECTION("periodic checkpoints hold the final state and pass check") {
    RunConfig c = small_config("ckpt");
    c.outputs.checkpoint = scratch("ckpt.bin").string();
    c.outputs.checkpoint_interval = 4;
    REQUIRE(cmd_run(c, log) == exit_ok);
    const Checkpoint cp = checkpoint_read(c.outputs.checkpoint);
    CHECK(cp.state.time == 1.0);
    std::ostringstream check_log;
    CHECK(cmd_check(c.outputs.checkpoint, check_log) == exit_ok);
    CHECK_THAT(check_log.str(), ContainsSubstring("PASS exchange cancellation"));
    CHECK_THAT(check_log.str(), !ContainsSubstring("FAIL"));
  }
  SECTION("a diverging run exits with the blow-up code") {
    RunConfig c = small_config("blowup");
    c.initial.amplitude_u = 1e4;
    c.control.dt = 1.0;
    c.control.cfl_safety = 1.0;
    c.control.dt_cap = 1.0;
    c.outputs.t_end = 200.0;
    std::ostringstream blow;
    CHECK(cmd_run(c, blow) == exit_blow_up);
    CHECK_THAT(blow.str(), ContainsSubstring("blow-up at t ="));
  }
}

TEST_CASE("check flags a non-solenoidal state", "[check]") {
  const Grid g(8, 2.0 * std::numbers::pi);
  State s = State::zeros(g);
  s.u[0].set_mode(1, 0, 0, Complex(0.5, 0.0));  // u1 = cos x1 has nonzero divergence
  const auto path = scratch("bad.bin");
  checkpoint_write(s, PhysParams{}, path.string());
  std::ostringstream log;
  CHECK(cmd_check(path.string(), log) == exit_check_failed);
  CHECK_THAT(log.str(), ContainsSubstring("FAIL div u residual"));
}

TEST_CASE("fit and oracle commands", "[fit][oracle]") {
  const auto path = scratch("synthetic.csv");
  {
    std::ofstream out(path);
    out << "time,energy\n";
    for (int i = 0; i <= 40; ++i) {
      const double t = 0.25 * i;
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", t, 3.0 * std::pow(1.0 + t, -1.5));
      out << buf;
    }
  }
  std::ostringstream log;
  CHECK(cmd_fit(path.string(), "energy", 1.0, 10.0, log) == exit_ok);
  const std::string text = log.str();
  const auto at = text.find("exponent ");
  REQUIRE(at != std::string::npos);
  CHECK_THAT(std::stod(text.substr(at + 9)), WithinAbs(-1.5, 1e-12));
  CHECK_THROWS_AS(cmd_fit(path.string(), "missing", 1.0, 10.0, log), IoError);

  RunConfig c;
  c.outputs.csv = scratch("oracle.csv").string();
  c.outputs.t_first = 10.0;
  c.outputs.t_end = 1e4;
  c.outputs.sample_count = 30;
  std::ostringstream olog;
  REQUIRE(cmd_oracle(c, olog) == exit_ok);
  const CsvTable t = read_csv(c.outputs.csv);
  CHECK(t.rows.size() == 29);
  const auto q = t.column("energy_quadrature"), cf = t.column("energy_closed_form");
  for (std::size_t i = 0; i < q.size(); ++i) CHECK_THAT(q[i], Catch::Matchers::WithinRel(cf[i], 1e-9));
  CHECK_THAT(olog.str(), ContainsSubstring("shell_bound_p4_3"));
}

TEST_CASE("command-line interface", "[cli]") {
  const auto out = scratch("cli.txt");
  const auto cfg = scratch("cli.yaml");
  std::ofstream(cfg) << "grid:\n  n_points: 8\n  box_length: 6.283185307179586\n"
                        "control:\n  dt: 0.1\n"
                        "outputs:\n  t_end: 0.5\n  sample_count: 6\n  checkpoint_interval: 1\n";
  const auto csv = scratch("cli.csv"), ckpt = scratch("cli.bin");

  CHECK(run_cli("run -c " + cfg.string() + " --csv " + csv.string() + " --checkpoint " +
                    ckpt.string() + " --seed 5",
                out) == 0);
  CHECK(lines(csv).size() == 7);
  CHECK(run_cli("check " + ckpt.string(), out) == 0);
  CHECK_THAT(slurp(out), ContainsSubstring("PASS div u residual"));
  CHECK(run_cli("fit " + csv.string() + " l2_u_sq --t-lo 0 --t-hi 1", out) == 0);
  CHECK_THAT(slurp(out), ContainsSubstring("l2_u_sq: exponent"));

  std::ofstream(scratch("bad.yaml")) << "params:\n  mu: -2\n";
  CHECK(run_cli("run -c " + scratch("bad.yaml").string(), out) == 1);
  CHECK_THAT(slurp(out), ContainsSubstring("params.mu"));
  CHECK(run_cli("check " + scratch("does_not_exist.bin").string(), out) == 1);
  CHECK(run_cli("frobnicate", out) != 0);
}
