// echosim CLI: subcommands echo | return | omega-sweep | length-sweep.
// Precedence: built-in defaults < --config file < flags. Exit codes: 0 ok,
// 1 configuration/usage error, 2 numerical failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "echosim/echosim.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw echosim::ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

int main(int argc, char** argv) {
  using namespace echosim;

  CLI::App app{"Single-excitation dynamics of two coupled cavities attached to a "
               "multimode ring resonator: Loschmidt-echo, return-probability and "
               "photon-variance diagnostics, coupling and length sweeps."};
  app.require_subcommand(1);

  std::string config_path, out_path, format_text, omega_ratio_text, initial_text;
  std::string lengths_text, ratios_text, policy_text, label_text;
  double epsilon = 0, t_max = 0, dt = 0, omega_abs = 0, g = 0, delta_omega = 0;
  double omega0 = 0, avg_t0 = 0, band_width = 0;
  int n_modes = 0, avg_m = 0;
  unsigned threads = 0;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "configuration file (key = value lines)");
    sub->add_option("--out", out_path, "output path (default: standard output)");
    sub->add_option("--format", format_text, "csv|json");
    sub->add_option("--omega-ratio", omega_ratio_text,
                    "cavity coupling as ratio(s) of the critical coupling g/sqrt(2); "
                    "echo accepts a comma list (one column per ratio)");
    sub->add_option("--omega-abs", omega_abs, "cavity coupling in omega0 units");
    sub->add_option("--epsilon", epsilon, "dimensionless frequency perturbation");
    sub->add_option("--n-modes", n_modes, "comb count parameter N (even, >= 2)");
    sub->add_option("--t-max", t_max, "horizon in round trips T_B");
    sub->add_option("--dt", dt, "sample step in round trips T_B");
    sub->add_option("--initial", initial_text, "special|cavity2|superposition");
    sub->add_option("--lengths", lengths_text,
                    "length-sweep lengths in lambda0 units, comma-separated");
    sub->add_option("--ratios", ratios_text,
                    "omega-sweep grid: comma list or start:step:stop");
    sub->add_option("--g", g, "cavity-mode coupling in omega0 units");
    sub->add_option("--delta-omega", delta_omega, "mode spacing in omega0 units");
    sub->add_option("--omega0", omega0, "reference frequency (natural unit)");
    sub->add_option("--avg-t0", avg_t0, "averaging window start, round trips");
    sub->add_option("--avg-m", avg_m, "averaging window length, round trips");
    sub->add_option("--policy", policy_text, "length-sweep mode count: fixed-n|fixed-band");
    sub->add_option("--band-width", band_width, "fixed-band comb width in omega0 units");
    sub->add_option("--threads", threads, "sweep worker threads (0 = hardware)");
    sub->add_option("--label", label_text, "free-text label recorded in the manifest");
  };

  CLI::App* cmd_echo =
      app.add_subcommand("echo", "Loschmidt echo of perturbed vs unperturbed evolution");
  CLI::App* cmd_return =
      app.add_subcommand("return", "return probability p(t), peak period, decay rate");
  CLI::App* cmd_omega =
      app.add_subcommand("omega-sweep", "sweep the cavity coupling; locate the variance maximum");
  CLI::App* cmd_length =
      app.add_subcommand("length-sweep", "sweep the resonator length across the transition");
  for (CLI::App* sub : {cmd_echo, cmd_return, cmd_omega, cmd_length}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    CLI::App* active = app.get_subcommands().front();

    KeyLines key_lines;
    RunConfig config;
    if (active->count("--config") > 0) config = parse_config(read_file(config_path), &key_lines);

    if (active == cmd_echo) config.experiment = ExperimentKind::Echo;
    else if (active == cmd_return) config.experiment = ExperimentKind::Return;
    else if (active == cmd_omega) config.experiment = ExperimentKind::OmegaSweep;
    else config.experiment = ExperimentKind::LengthSweep;

    const auto given = [&](const char* flag) { return active->count(flag) > 0; };
    const auto mark = [&](const char* key) { key_lines[key] = 0; };

    if (given("--omega-ratio") && given("--omega-abs"))
      throw ConfigError("--omega-ratio and --omega-abs are mutually exclusive");
    if (given("--omega-ratio")) {
      config.omega_ratios = detail::parse_list(omega_ratio_text, "omega_ratio", 0);
      config.omega_abs.reset();
      key_lines.erase("omega_abs");
      mark("omega_ratio");
    }
    if (given("--omega-abs")) {
      config.omega_abs = omega_abs;
      config.omega_ratios.clear();
      key_lines.erase("omega_ratio");
      mark("omega_abs");
    }
    if (given("--epsilon")) { config.epsilon = epsilon; mark("epsilon"); }
    if (given("--n-modes")) { config.n_modes = n_modes; mark("n_modes"); }
    if (given("--t-max")) { config.t_max = t_max; mark("t_max"); }
    if (given("--dt")) { config.dt = dt; mark("dt"); }
    if (given("--initial")) { config.initial = initial_state_from_string(initial_text); mark("initial"); }
    if (given("--lengths")) { config.lengths = detail::parse_list(lengths_text, "lengths", 0); mark("lengths"); }
    if (given("--ratios")) { config.sweep_ratios = detail::parse_list(ratios_text, "ratios", 0); mark("ratios"); }
    if (given("--g")) { config.g = g; mark("g"); }
    if (given("--delta-omega")) { config.delta_omega = delta_omega; mark("delta_omega"); }
    if (given("--omega0")) { config.omega0 = omega0; mark("omega0"); }
    if (given("--avg-t0")) { config.avg_t0 = avg_t0; mark("avg_t0"); }
    if (given("--avg-m")) { config.avg_m = avg_m; mark("avg_m"); }
    if (given("--policy")) { config.policy = detail::parse_policy(policy_text, 0); mark("policy"); }
    if (given("--band-width")) { config.band_width = band_width; mark("band_width"); }
    if (given("--threads")) { config.threads = threads; mark("threads"); }
    if (given("--label")) { config.label = label_text; mark("label"); }
    if (given("--out")) { config.out_path = out_path; mark("out"); }
    if (given("--format")) { config.format = detail::parse_format(format_text, 0); mark("format"); }

    config = resolve_config(std::move(config), key_lines);
    return run_experiment(config);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << '\n';
    return 2;
  }
}
