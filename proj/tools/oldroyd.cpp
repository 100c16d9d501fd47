#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "oldroyd/commands.hpp"
#include "oldroyd/decay.hpp"
#include "oldroyd/error.hpp"

namespace {

struct Overrides {
  std::string csv;
  std::string checkpoint;
  std::optional<std::uint64_t> seed;
};

oldroyd::RunConfig load(const std::string& path, const Overrides& o) {
  oldroyd::RunConfig c = path.empty() ? oldroyd::parse_config("") : oldroyd::load_config(path);
  if (!o.csv.empty()) c.outputs.csv = o.csv;
  if (!o.checkpoint.empty()) c.outputs.checkpoint = o.checkpoint;
  if (o.seed) c.initial.seed = *o.seed;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decay experiments for the damped Oldroyd system on a periodic box"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides over;

  auto* run = app.add_subcommand("run", "evolve the configured initial data");
  std::string resume;
  run->add_option("-c,--config", config_path, "YAML config file");
  run->add_option("--csv", over.csv, "time-series output path");
  run->add_option("--checkpoint", over.checkpoint, "checkpoint path");
  run->add_option("--seed", over.seed, "random seed for the initial data");
  run->add_option("--resume", resume, "checkpoint to resume from");

  auto* oracle = app.add_subcommand("oracle", "whole-space linear energy and shell integrals");
  oracle->add_option("-c,--config", config_path, "YAML config file");
  oracle->add_option("--csv", over.csv, "output path");

  auto* fit = app.add_subcommand("fit", "fit a power law in (1 + t) to a CSV column");
  std::string fit_csv, fit_column;
  std::optional<double> t_lo, t_hi;
  fit->add_option("csv", fit_csv, "CSV written by run or oracle")->required();
  fit->add_option("column", fit_column, "column name, e.g. hm_sq[1]")->required();
  fit->add_option("--t-lo", t_lo, "window start");
  fit->add_option("--t-hi", t_hi, "window end");
  fit->add_option("-c,--config", config_path,
                  "config whose validity window fills any missing bound");

  auto* check = app.add_subcommand("check", "run the invariant suite on a checkpoint");
  std::string check_path;
  check->add_option("checkpoint", check_path, "checkpoint file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      return oldroyd::cmd_run(load(config_path, over), std::cout,
                              resume.empty() ? std::nullopt : std::optional<std::string>(resume));
    }
    if (*oracle) return oldroyd::cmd_oracle(load(config_path, over), std::cout);
    if (*fit) {
      if (!t_lo || !t_hi) {
        if (config_path.empty()) {
          std::cerr << "fit: give --t-lo and --t-hi, or --config for the validity window\n";
          return oldroyd::exit_error;
        }
        const auto c = load(config_path, over);
        const auto w = oldroyd::validity_window(c.make_grid(), c.params, c.gamma,
                                                c.window.transient_skip, c.window.c_win);
        if (!t_lo) t_lo = w.t_lo;
        if (!t_hi) t_hi = w.t_hi;
      }
      return oldroyd::cmd_fit(fit_csv, fit_column, *t_lo, *t_hi, std::cout);
    }
    if (*check) return oldroyd::cmd_check(check_path, std::cout);
  } catch (const oldroyd::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return oldroyd::exit_error;
  }
  return oldroyd::exit_error;
}
