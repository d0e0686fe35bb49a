// Experiment runner: pick a catalogue system and a method, integrate, and
// write trajectories / method comparisons / convergence tables as CSV or
// JSON. Exit codes: 0 success, 2 configuration error, 3 numerical
// divergence, 4 unmeasurable quantity.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "foliate/dataset.hpp"
#include "foliate/diagnostics.hpp"
#include "foliate/errors.hpp"
#include "foliate/systems.hpp"

namespace {

using namespace foliate;

struct Layer {
  std::optional<std::string> system, method, method2, tableau, ic, format, out;
  std::optional<double> dt;
  std::optional<int> steps;
  std::optional<long long> seed;
  std::optional<std::string> dt_list;
  Params params;
};

struct Resolved {
  std::string command;
  std::string system, method, method2, tableau, ic, out;
  std::string format = "csv";
  double dt = 0.1;
  int steps = 10;
  long long seed = 0;
  std::string dt_list;
  Params params;
};

struct FlagStore {
  std::string system, method, method2, tableau, ic, format, out, config, dt_list;
  std::vector<std::string> params;
  double dt = 0.0;
  int steps = 0;
  long long seed = 0;
  bool figure2 = false;

  CLI::Option* o_system = nullptr;
  CLI::Option* o_method = nullptr;
  CLI::Option* o_method2 = nullptr;
  CLI::Option* o_tableau = nullptr;
  CLI::Option* o_ic = nullptr;
  CLI::Option* o_format = nullptr;
  CLI::Option* o_out = nullptr;
  CLI::Option* o_dt = nullptr;
  CLI::Option* o_steps = nullptr;
  CLI::Option* o_seed = nullptr;
  CLI::Option* o_dt_list = nullptr;
  CLI::Option* o_params = nullptr;
};

void add_common(CLI::App* cmd, FlagStore& f) {
  f.o_system = cmd->add_option("--system", f.system, "catalogue system name");
  f.o_params = cmd->add_option("--param", f.params, "system parameter as name=value (repeatable)");
  f.o_method = cmd->add_option("--method", f.method, "one-step method name");
  f.o_tableau = cmd->add_option("--tableau", f.tableau, "Runge-Kutta tableau override");
  f.o_dt = cmd->add_option("--dt", f.dt, "step size");
  f.o_steps = cmd->add_option("--steps", f.steps, "number of steps");
  f.o_ic = cmd->add_option("--ic", f.ic,
                           "initial condition: comma list, circle:R:N, or leaf-bundle:seed:N");
  f.o_out = cmd->add_option("--out", f.out, "output path (stdout when omitted)");
  f.o_format = cmd->add_option("--format", f.format, "csv or json");
  f.o_seed = cmd->add_option("--seed", f.seed, "random seed (default: FOLIATE_SEED or 0)");
  cmd->add_option("--config", f.config, "JSON config file; flags override its values");
}

Params parse_param_flags(const std::vector<std::string>& kvs) {
  Params params;
  for (const std::string& kv : kvs) {
    std::size_t eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw DomainError("--param expects name=value, got '" + kv + "'");
    }
    try {
      params[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
    } catch (const std::exception&) {
      throw DomainError("--param value in '" + kv + "' is not a number");
    }
  }
  return params;
}

Layer layer_from_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open config file '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw DomainError("config file '" + path + "': " + e.what());
  }
  Layer layer;
  auto str = [&](const char* key, std::optional<std::string>& slot) {
    if (doc.contains(key)) slot = doc[key].get<std::string>();
  };
  str("system", layer.system);
  str("method", layer.method);
  str("method2", layer.method2);
  str("tableau", layer.tableau);
  str("ic", layer.ic);
  str("format", layer.format);
  str("out", layer.out);
  str("dt-list", layer.dt_list);
  if (doc.contains("dt")) layer.dt = doc["dt"].get<double>();
  if (doc.contains("steps")) layer.steps = doc["steps"].get<int>();
  if (doc.contains("seed")) layer.seed = doc["seed"].get<long long>();
  if (doc.contains("params")) {
    for (const auto& [key, value] : doc["params"].items()) {
      layer.params[key] = value.get<double>();
    }
  }
  return layer;
}

Layer layer_from_flags(const FlagStore& f) {
  Layer layer;
  auto set = [](auto& slot, const CLI::Option* opt, const auto& value) {
    if (opt && opt->count() > 0) slot = value;
  };
  set(layer.system, f.o_system, f.system);
  set(layer.method, f.o_method, f.method);
  set(layer.method2, f.o_method2, f.method2);
  set(layer.tableau, f.o_tableau, f.tableau);
  set(layer.ic, f.o_ic, f.ic);
  set(layer.format, f.o_format, f.format);
  set(layer.out, f.o_out, f.out);
  set(layer.dt, f.o_dt, f.dt);
  set(layer.steps, f.o_steps, f.steps);
  set(layer.seed, f.o_seed, f.seed);
  set(layer.dt_list, f.o_dt_list, f.dt_list);
  if (f.o_params && f.o_params->count() > 0) layer.params = parse_param_flags(f.params);
  return layer;
}

void apply(Resolved& r, const Layer& layer) {
  if (layer.system) r.system = *layer.system;
  if (layer.method) r.method = *layer.method;
  if (layer.method2) r.method2 = *layer.method2;
  if (layer.tableau) r.tableau = *layer.tableau;
  if (layer.ic) r.ic = *layer.ic;
  if (layer.format) r.format = *layer.format;
  if (layer.out) r.out = *layer.out;
  if (layer.dt) r.dt = *layer.dt;
  if (layer.steps) r.steps = *layer.steps;
  if (layer.seed) r.seed = *layer.seed;
  if (layer.dt_list) r.dt_list = *layer.dt_list;
  for (const auto& [key, value] : layer.params) r.params[key] = value;
}

Resolved resolve(const std::string& command, const FlagStore& flags,
                 const Layer& preset = {}) {
  Resolved r;
  r.command = command;
  if (const char* env = std::getenv("FOLIATE_SEED")) {
    try {
      r.seed = std::stoll(env);
    } catch (const std::exception&) {
      throw DomainError("FOLIATE_SEED is not an integer");
    }
  }
  apply(r, preset);
  if (!flags.config.empty()) apply(r, layer_from_config(flags.config));
  apply(r, layer_from_flags(flags));
  return r;
}

void validate_common(const Resolved& r) {
  if (r.system.empty()) throw DomainError("missing --system");
  if (r.method.empty()) throw DomainError("missing --method");
  if (r.steps < 1) throw DomainError("steps must be >= 1");
  if (!(r.dt > 0.0)) throw DomainError("dt must be > 0");
  if (r.format != "csv" && r.format != "json") {
    throw DomainError("format must be csv or json, got '" + r.format + "'");
  }
}

std::vector<double> parse_number_list(const std::string& text, const char* what,
                                      char separator = ',') {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, separator)) {
    try {
      values.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw DomainError(std::string(what) + ": '" + item + "' is not a number");
    }
  }
  if (values.empty()) throw DomainError(std::string(what) + ": empty list");
  return values;
}

std::vector<Matrix> parse_ics(const std::string& spec, const BuiltinSystem& sys) {
  const PlainSystem& plain = sys.plain;
  if (spec.empty()) return {plain.default_ic};
  if (spec.rfind("circle:", 0) == 0) {
    std::vector<double> args = parse_number_list(spec.substr(7), "--ic circle", ':');
    if (args.size() != 2) throw DomainError("--ic circle expects circle:radius:count");
    double radius = args[0];
    int count = static_cast<int>(std::lround(args[1]));
    if (count < 1) throw DomainError("--ic circle: count must be >= 1");
    if (plain.state_rows * plain.state_cols != 2) {
      throw DomainError("--ic circle needs a planar system");
    }
    std::vector<Matrix> ics;
    for (int j = 0; j < count; ++j) {
      double angle = 2.0 * M_PI * j / count;
      ics.push_back(Matrix::column({radius * std::cos(angle), radius * std::sin(angle)}));
    }
    return ics;
  }
  if (spec.rfind("leaf-bundle:", 0) == 0) {
    std::vector<double> args = parse_number_list(spec.substr(12), "--ic leaf-bundle", ':');
    if (args.size() != 2) throw DomainError("--ic leaf-bundle expects leaf-bundle:seed:count");
    if (!sys.foliate) {
      throw DomainError("--ic leaf-bundle needs a system with a registered group action");
    }
    int count = static_cast<int>(std::lround(args[1]));
    if (count < 1) throw DomainError("--ic leaf-bundle: count must be >= 1");
    return co_leaf_bundle(sys.foliate->action, plain.default_ic,
                          count, static_cast<std::uint64_t>(std::llround(args[0])));
  }
  std::vector<double> entries = parse_number_list(spec, "--ic");
  if (static_cast<int>(entries.size()) != plain.state_rows * plain.state_cols) {
    throw DomainError("--ic has " + std::to_string(entries.size()) + " entries, system '" +
                      plain.name + "' needs " +
                      std::to_string(plain.state_rows * plain.state_cols));
  }
  Matrix ic(plain.state_rows, plain.state_cols);
  for (int k = 0; k < ic.size(); ++k) ic[k] = entries[static_cast<std::size_t>(k)];
  return {ic};
}

std::vector<std::pair<std::string, Cell>> meta_of(const Resolved& r, const BuiltinSystem& sys) {
  std::vector<std::pair<std::string, Cell>> meta;
  meta.emplace_back("command", r.command);
  meta.emplace_back("system", r.system);
  for (const auto& [key, value] : sys.params) meta.emplace_back("param." + key, value);
  meta.emplace_back("method", r.method);
  if (!r.method2.empty()) meta.emplace_back("method2", r.method2);
  if (!r.tableau.empty()) meta.emplace_back("tableau", r.tableau);
  meta.emplace_back("dt", r.dt);
  meta.emplace_back("steps", static_cast<long long>(r.steps));
  meta.emplace_back("ic", r.ic.empty() ? std::string("default") : r.ic);
  if (!r.dt_list.empty()) meta.emplace_back("dt-list", r.dt_list);
  meta.emplace_back("seed", r.seed);
  meta.emplace_back("format", r.format);
  return meta;
}

void emit(const Dataset& data, const Resolved& r, const BuiltinSystem& sys) {
  std::ostringstream body;
  if (r.format == "csv") {
    write_csv(data, body);
  } else {
    write_json(data, meta_of(r, sys), body);
  }
  if (r.out.empty()) {
    std::cout << body.str();
  } else {
    std::ofstream out(r.out, std::ios::binary);
    if (!out) throw DomainError("cannot open output file '" + r.out + "'");
    out << body.str();
  }
}

void append_state_columns(Dataset& data, const PlainSystem& plain) {
  for (int k = 0; k < plain.state_rows * plain.state_cols; ++k) {
    data.columns.push_back("x" + std::to_string(k));
  }
  for (int k = 0; k < plain.leaf_dim; ++k) data.columns.push_back("I" + std::to_string(k));
}

int cmd_run(const Resolved& r) {
  validate_common(r);
  BuiltinSystem sys = builtin_system(r.system, r.params);
  Stepper stepper = make_stepper(sys, r.method, r.tableau);
  std::vector<Matrix> ics = parse_ics(r.ic, sys);

  Dataset data;
  bool bundle = ics.size() > 1;
  if (bundle) data.columns.push_back("ic");
  data.columns.push_back("step");
  data.columns.push_back("t");
  append_state_columns(data, sys.plain);

  for (std::size_t j = 0; j < ics.size(); ++j) {
    Trajectory traj =
        integrate(stepper, ics[j], r.dt, r.steps, sys.plain.leaf_invariant, r.system);
    for (std::size_t n = 0; n < traj.states.size(); ++n) {
      std::vector<Cell> row;
      if (bundle) row.emplace_back(static_cast<long long>(j));
      row.emplace_back(static_cast<long long>(n));
      row.emplace_back(traj.times[n]);
      for (int k = 0; k < traj.states[n].size(); ++k) row.emplace_back(traj.states[n][k]);
      if (!traj.leaf_values.empty()) {
        for (double v : traj.leaf_values[n]) row.emplace_back(v);
      }
      data.rows.push_back(std::move(row));
    }
  }
  emit(data, r, sys);
  return 0;
}

int cmd_compare(const Resolved& r) {
  validate_common(r);
  if (r.method2.empty()) throw DomainError("compare needs --method2 (or --figure2)");
  BuiltinSystem sys = builtin_system(r.system, r.params);
  if (!sys.plain.leaf_invariant) {
    throw DomainError("compare needs a system with a leaf invariant");
  }
  std::vector<Matrix> ics = parse_ics(r.ic, sys);

  Dataset data;
  data.columns = {"kind", "method", "ic", "step", "t"};
  append_state_columns(data, sys.plain);
  data.columns.push_back("spread");

  for (const std::string& method : {r.method, r.method2}) {
    Stepper stepper = make_stepper(sys, method, r.tableau);
    std::vector<Trajectory> bundle;
    for (const Matrix& ic : ics) {
      bundle.push_back(integrate(stepper, ic, r.dt, r.steps, sys.plain.leaf_invariant, r.system));
    }
    for (std::size_t j = 0; j < bundle.size(); ++j) {
      for (std::size_t n = 0; n < bundle[j].states.size(); ++n) {
        std::vector<Cell> row{std::string("state"), method, static_cast<long long>(j),
                              static_cast<long long>(n), bundle[j].times[n]};
        for (int k = 0; k < bundle[j].states[n].size(); ++k) {
          row.emplace_back(bundle[j].states[n][k]);
        }
        for (double v : bundle[j].leaf_values[n]) row.emplace_back(v);
        row.emplace_back(std::monostate{});
        data.rows.push_back(std::move(row));
      }
    }
    std::vector<double> spread = leaf_spread(bundle);
    for (std::size_t n = 0; n < spread.size(); ++n) {
      std::vector<Cell> row{std::string("spread"), method, std::monostate{},
                            static_cast<long long>(n), n * r.dt};
      for (int k = 0; k < sys.plain.state_rows * sys.plain.state_cols + sys.plain.leaf_dim; ++k) {
        row.emplace_back(std::monostate{});
      }
      row.emplace_back(spread[n]);
      data.rows.push_back(std::move(row));
    }
  }
  emit(data, r, sys);
  return 0;
}

int cmd_order(const Resolved& r) {
  validate_common(r);
  if (r.dt_list.empty()) throw DomainError("order needs --dt-list");
  std::vector<double> taus = parse_number_list(r.dt_list, "--dt-list");
  if (taus.size() < 3) throw DomainError("--dt-list needs at least 3 step sizes");
  BuiltinSystem sys = builtin_system(r.system, r.params);
  Stepper stepper = make_stepper(sys, r.method, r.tableau);
  std::vector<Matrix> ics = parse_ics(r.ic, sys);
  double t_final = r.dt * r.steps;

  ConvergenceReport report =
      convergence_order(stepper, sys.plain.rhs, ics.front(), t_final, taus);

  Dataset data;
  data.columns = {"kind", "tau", "error", "slope"};
  for (std::size_t i = 0; i < report.taus.size(); ++i) {
    std::vector<Cell> row{std::string("sample"), report.taus[i], report.errors[i]};
    if (i == 0) {
      row.emplace_back(std::monostate{});
    } else {
      row.emplace_back(report.local_slopes[i]);
    }
    data.rows.push_back(std::move(row));
  }
  data.rows.push_back({std::string("fit"), std::monostate{}, std::monostate{}, report.slope});
  emit(data, r, sys);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"foliate: leaf-preserving integrators and experiments"};
  app.require_subcommand(1);

  FlagStore run_flags, compare_flags, order_flags;
  CLI::App* run = app.add_subcommand("run", "integrate one system, write the trajectory");
  add_common(run, run_flags);
  CLI::App* compare = app.add_subcommand(
      "compare", "integrate a bundle of initial conditions under two methods, with leaf spreads");
  add_common(compare, compare_flags);
  compare_flags.o_method2 =
      compare->add_option("--method2", compare_flags.method2, "second method to compare");
  compare->add_flag("--figure2", compare_flags.figure2,
                    "preset: eq1, lie-euler vs euler, dt 0.1, 4 steps, 20 points on radius 2");
  CLI::App* order = app.add_subcommand("order", "measured convergence order over a dt list");
  add_common(order, order_flags);
  order_flags.o_dt_list = order->add_option("--dt-list", order_flags.dt_list,
                                            "comma list of step sizes (T = dt * steps)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) return cmd_run(resolve("run", run_flags));
    if (compare->parsed()) {
      Layer preset;
      if (compare_flags.figure2) {
        preset.system = "eq1";
        preset.method = "lie-euler";
        preset.method2 = "euler";
        preset.dt = 0.1;
        preset.steps = 4;
        preset.ic = "circle:2:20";
      }
      return cmd_compare(resolve("compare", compare_flags, preset));
    }
    if (order->parsed()) return cmd_order(resolve("order", order_flags));
    std::cerr << "no subcommand given\n";
    return 2;
  } catch (const CatalogError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DimensionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const PrecisionFloorError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const NonconvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const SingularLeafError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
