#include "oldroyd/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "oldroyd/error.hpp"

namespace oldroyd {

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"grid", {"n_points", "box_length"}},
      {"params", {"mu", "nu"}},
      {"initial", {"profile", "cutoff_k", "amplitude_u", "amplitude_F", "seed"}},
      {"control", {"dt", "cfl_safety", "max_steps", "nan_check_interval", "dt_cap"}},
      {"schedule", {"gamma"}},
      {"outputs",
       {"samples", "t_first", "t_end", "sample_count", "csv", "checkpoint", "checkpoint_interval"}},
      {"window", {"transient_skip", "c_win"}},
      {"oracle", {"profile", "cutoff", "width", "power"}},
  };
  return keys;
}

const std::map<std::string, SpectrumProfile::Shape> shape_names{
    {"flat", SpectrumProfile::Shape::flat_low_k_gaussian_cutoff},
    {"single_mode", SpectrumProfile::Shape::single_mode},
    {"ring", SpectrumProfile::Shape::ring},
};

const std::map<std::string, RadialProfile::Kind> oracle_names{
    {"flat", RadialProfile::Kind::flat_then_gaussian},
    {"power", RadialProfile::Kind::power},
};

const std::map<std::string, SampleSpacing> spacing_names{
    {"geometric", SampleSpacing::geometric},
    {"linear", SampleSpacing::linear},
};

template <class E>
std::string name_of(const std::map<std::string, E>& names, E value) {
  for (const auto& [k, v] : names)
    if (v == value) return k;
  return "?";
}

template <class E>
E parse_enum(const std::map<std::string, E>& names, const std::string& text,
             const std::string& field) {
  const auto it = names.find(text);
  if (it == names.end()) {
    std::string allowed;
    for (const auto& [k, v] : names) allowed += (allowed.empty() ? "" : ", ") + k;
    throw ConfigError(field + ": unknown value '" + text + "' (allowed: " + allowed + ")");
  }
  return it->second;
}

template <class T>
void read(const YAML::Node& section, const char* key, const std::string& prefix, T& out) {
  const YAML::Node node = section[key];
  if (!node) return;
  try {
    out = node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(prefix + "." + key + ": cannot convert '" + YAML::Dump(node) + "'");
  }
}

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw RangeError(field + " " + what);
}

}  // namespace

void RunConfig::validate() const {
  require(grid.n_points >= 8 && grid.n_points % 2 == 0, "grid.n_points",
          "must be an even integer >= 8");
  require(grid.box_length > 0.0 && std::isfinite(grid.box_length), "grid.box_length",
          "must be positive");
  require(params.mu > 0.0 && std::isfinite(params.mu), "params.mu", "must be positive");
  require(params.nu >= 0.0 && std::isfinite(params.nu), "params.nu", "must be nonnegative");
  require(initial.cutoff_k > 0.0, "initial.cutoff_k", "must be positive");
  require(initial.amplitude_u >= 0.0 && std::isfinite(initial.amplitude_u),
          "initial.amplitude_u", "must be nonnegative");
  require(initial.amplitude_f >= 0.0 && std::isfinite(initial.amplitude_f),
          "initial.amplitude_F", "must be nonnegative");
  require(control.dt > 0.0, "control.dt", "must be positive");
  require(control.cfl_safety > 0.0 && control.cfl_safety <= 1.0, "control.cfl_safety",
          "must lie in (0, 1]");
  require(control.max_steps > 0, "control.max_steps", "must be positive");
  require(control.nan_check_interval > 0, "control.nan_check_interval", "must be positive");
  require(control.dt_cap > 0.0, "control.dt_cap", "must be positive");
  require(gamma > 0.0, "schedule.gamma", "must be positive");
  require(outputs.t_first > 0.0, "outputs.t_first", "must be positive");
  require(outputs.t_end > outputs.t_first, "outputs.t_end", "must exceed outputs.t_first");
  require(outputs.sample_count >= 3, "outputs.sample_count", "must be at least 3");
  require(outputs.checkpoint_interval >= 0, "outputs.checkpoint_interval",
          "must be nonnegative");
  require(window.transient_skip >= 0.0, "window.transient_skip", "must be nonnegative");
  require(window.c_win > 0.0, "window.c_win", "must be positive");
  require(m_order >= 3, "m_order", "must be an integer >= 3");
  require(oracle.cutoff > 0.0, "oracle.cutoff", "must be positive");
  require(oracle.width >= 0.0, "oracle.width", "must be nonnegative");
  require(oracle.profile != RadialProfile::Kind::power || oracle.power > -1.5, "oracle.power",
          "must exceed -1.5");
}

Grid RunConfig::make_grid() const { return Grid(grid.n_points, grid.box_length); }

SpectrumProfile RunConfig::u_profile() const {
  SpectrumProfile p;
  p.shape = initial.profile;
  p.cutoff_k = initial.cutoff_k;
  p.target_l2_norm = initial.amplitude_u;
  p.seed = initial.seed;
  return p;
}

SpectrumProfile RunConfig::f_profile() const {
  SpectrumProfile p = u_profile();
  p.target_l2_norm = initial.amplitude_f;
  return p;
}

RadialProfile RunConfig::radial_profile() const {
  return oracle.profile == RadialProfile::Kind::power
             ? RadialProfile::power(oracle.power, oracle.cutoff)
             : RadialProfile::flat(oracle.cutoff, oracle.width);
}

std::vector<double> RunConfig::sample_times() const {
  const int count = outputs.sample_count - 1;
  std::vector<double> times{0.0};
  for (int k = 0; k < count; ++k) {
    double t;
    if (outputs.spacing == SampleSpacing::geometric) {
      const double ratio = std::log(outputs.t_end / outputs.t_first) / (count - 1);
      t = outputs.t_first * std::exp(ratio * k);
    } else {
      t = outputs.t_end * (k + 1) / count;
    }
    times.push_back(k == count - 1 ? outputs.t_end : t);
  }
  return times;
}

RunConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  RunConfig c;
  if (!root || root.IsNull()) {
    c.validate();
    return c;
  }
  if (!root.IsMap()) throw ConfigError("config must be a mapping of sections");

  const auto& keys = known_keys();
  for (const auto& entry : root) {
    const auto name = entry.first.as<std::string>();
    if (name == "m_order") continue;
    const auto it = keys.find(name);
    if (it == keys.end()) throw ConfigError("unknown config key '" + name + "'");
    if (entry.second.IsNull()) continue;
    if (!entry.second.IsMap()) throw ConfigError("config section '" + name + "' must be a mapping");
    for (const auto& field : entry.second) {
      const auto key = field.first.as<std::string>();
      if (!it->second.count(key)) throw ConfigError("unknown config key '" + name + "." + key + "'");
    }
  }

  const YAML::Node grid = root["grid"];
  read(grid, "n_points", "grid", c.grid.n_points);
  read(grid, "box_length", "grid", c.grid.box_length);

  const YAML::Node params = root["params"];
  read(params, "mu", "params", c.params.mu);
  read(params, "nu", "params", c.params.nu);

  const YAML::Node initial = root["initial"];
  if (initial["profile"]) {
    c.initial.profile =
        parse_enum(shape_names, initial["profile"].as<std::string>(), "initial.profile");
  }
  read(initial, "cutoff_k", "initial", c.initial.cutoff_k);
  read(initial, "amplitude_u", "initial", c.initial.amplitude_u);
  read(initial, "amplitude_F", "initial", c.initial.amplitude_f);
  read(initial, "seed", "initial", c.initial.seed);

  const YAML::Node control = root["control"];
  read(control, "dt", "control", c.control.dt);
  read(control, "cfl_safety", "control", c.control.cfl_safety);
  read(control, "max_steps", "control", c.control.max_steps);
  read(control, "nan_check_interval", "control", c.control.nan_check_interval);
  read(control, "dt_cap", "control", c.control.dt_cap);

  read(root["schedule"], "gamma", "schedule", c.gamma);

  const YAML::Node outputs = root["outputs"];
  if (outputs["samples"]) {
    c.outputs.spacing =
        parse_enum(spacing_names, outputs["samples"].as<std::string>(), "outputs.samples");
  }
  read(outputs, "t_first", "outputs", c.outputs.t_first);
  read(outputs, "t_end", "outputs", c.outputs.t_end);
  read(outputs, "sample_count", "outputs", c.outputs.sample_count);
  read(outputs, "csv", "outputs", c.outputs.csv);
  read(outputs, "checkpoint", "outputs", c.outputs.checkpoint);
  read(outputs, "checkpoint_interval", "outputs", c.outputs.checkpoint_interval);

  const YAML::Node window = root["window"];
  read(window, "transient_skip", "window", c.window.transient_skip);
  read(window, "c_win", "window", c.window.c_win);

  if (root["m_order"]) {
    try {
      c.m_order = root["m_order"].as<int>();
    } catch (const YAML::Exception&) {
      throw ConfigError("m_order: expected an integer");
    }
  }

  const YAML::Node oracle = root["oracle"];
  if (oracle["profile"]) {
    c.oracle.profile =
        parse_enum(oracle_names, oracle["profile"].as<std::string>(), "oracle.profile");
  }
  read(oracle, "cutoff", "oracle", c.oracle.cutoff);
  read(oracle, "width", "oracle", c.oracle.width);
  read(oracle, "power", "oracle", c.oracle.power);

  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string serialize_config(const RunConfig& c) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "grid" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "n_points" << YAML::Value << c.grid.n_points;
  out << YAML::Key << "box_length" << YAML::Value << c.grid.box_length;
  out << YAML::EndMap;

  out << YAML::Key << "params" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "mu" << YAML::Value << c.params.mu;
  out << YAML::Key << "nu" << YAML::Value << c.params.nu;
  out << YAML::EndMap;

  out << YAML::Key << "initial" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "profile" << YAML::Value << name_of(shape_names, c.initial.profile);
  out << YAML::Key << "cutoff_k" << YAML::Value << c.initial.cutoff_k;
  out << YAML::Key << "amplitude_u" << YAML::Value << c.initial.amplitude_u;
  out << YAML::Key << "amplitude_F" << YAML::Value << c.initial.amplitude_f;
  out << YAML::Key << "seed" << YAML::Value << c.initial.seed;
  out << YAML::EndMap;

  out << YAML::Key << "control" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "dt" << YAML::Value << c.control.dt;
  out << YAML::Key << "cfl_safety" << YAML::Value << c.control.cfl_safety;
  out << YAML::Key << "max_steps" << YAML::Value << c.control.max_steps;
  out << YAML::Key << "nan_check_interval" << YAML::Value << c.control.nan_check_interval;
  out << YAML::Key << "dt_cap" << YAML::Value << c.control.dt_cap;
  out << YAML::EndMap;

  out << YAML::Key << "schedule" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "gamma" << YAML::Value << c.gamma;
  out << YAML::EndMap;

  out << YAML::Key << "outputs" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "samples" << YAML::Value << name_of(spacing_names, c.outputs.spacing);
  out << YAML::Key << "t_first" << YAML::Value << c.outputs.t_first;
  out << YAML::Key << "t_end" << YAML::Value << c.outputs.t_end;
  out << YAML::Key << "sample_count" << YAML::Value << c.outputs.sample_count;
  out << YAML::Key << "csv" << YAML::Value << c.outputs.csv;
  out << YAML::Key << "checkpoint" << YAML::Value << c.outputs.checkpoint;
  out << YAML::Key << "checkpoint_interval" << YAML::Value << c.outputs.checkpoint_interval;
  out << YAML::EndMap;

  out << YAML::Key << "window" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "transient_skip" << YAML::Value << c.window.transient_skip;
  out << YAML::Key << "c_win" << YAML::Value << c.window.c_win;
  out << YAML::EndMap;

  out << YAML::Key << "m_order" << YAML::Value << c.m_order;

  out << YAML::Key << "oracle" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "profile" << YAML::Value << name_of(oracle_names, c.oracle.profile);
  out << YAML::Key << "cutoff" << YAML::Value << c.oracle.cutoff;
  out << YAML::Key << "width" << YAML::Value << c.oracle.width;
  out << YAML::Key << "power" << YAML::Value << c.oracle.power;
  out << YAML::EndMap;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace oldroyd
