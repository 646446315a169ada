// config.hpp — run configuration: documented defaults, the line-oriented
// `key = value` file format, and cross-field resolution shared by the file
// parser and the CLI flag overlay.
//
// Defaults reproduce the standard run: N = 50 modes spaced 4e-3 omega0,
// g = 6e-3 omega0, epsilon = 1e-5, cavity coupling at half the critical value,
// the excitation starting in cavity 1, 400 round trips sampled at T_B/100.

#pragma once

#include <charconv>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "echosim/experiments.hpp"
#include "echosim/model.hpp"

namespace echosim {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& message, int line = 0)
      : std::runtime_error(line > 0 ? "config line " + std::to_string(line) + ": " + message
                                    : "config: " + message),
        line(line) {}
  int line;
};

enum class ExperimentKind { Echo, Return, OmegaSweep, LengthSweep };
enum class OutputFormat { Csv, Json };

inline std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Echo: return "echo";
    case ExperimentKind::Return: return "return";
    case ExperimentKind::OmegaSweep: return "omega-sweep";
    case ExperimentKind::LengthSweep: return "length-sweep";
  }
  return "?";
}

inline std::string to_string(OutputFormat f) {
  return f == OutputFormat::Csv ? "csv" : "json";
}

inline std::string to_string(ModePolicy p) {
  return p == ModePolicy::FixedN ? "fixed-n" : "fixed-band";
}

// Coupling-ratio grid for the sweep default: 0.1 to 3.0 in steps of 0.05,
// bracketing the critical coupling densely.
inline std::vector<double> default_sweep_ratios() {
  std::vector<double> ratios;
  for (int k = 0;; ++k) {
    const double r = 0.1 + 0.05 * k;
    if (r > 3.0 + 1e-12) break;
    ratios.push_back(r);
  }
  return ratios;
}

struct RunConfig {
  ExperimentKind experiment = ExperimentKind::Echo;
  std::string label;

  double omega0 = 1.0;
  int n_modes = 50;
  double delta_omega = 4e-3;
  double g = 6e-3;
  double epsilon = 1e-5;

  // Cavity coupling: either ratios of the critical coupling (echo may list
  // several, producing one column each) or one absolute value. After
  // resolution exactly one of the two is populated for echo/return.
  std::vector<double> omega_ratios{0.5};
  std::optional<double> omega_abs;

  InitialState initial = InitialState::Cavity1;
  double t_max = 400.0;  // round trips
  double dt = 0.01;      // round trips

  double avg_t0 = 200.0;
  int avg_m = 200;

  std::vector<double> sweep_ratios = default_sweep_ratios();
  std::vector<double> lengths{250.0, 10.0};  // units of lambda0
  ModePolicy policy = ModePolicy::FixedN;
  std::optional<double> band_width;

  unsigned threads = 0;  // 0 = hardware concurrency
  std::string out_path;  // empty = standard output
  OutputFormat format = OutputFormat::Csv;

  bool operator==(const RunConfig&) const = default;

  // Base physical parameters with the cavity coupling left for the caller.
  SystemParams base_params(double cavity_coupling) const {
    SystemParams p;
    p.omega0 = omega0;
    p.n_modes = n_modes;
    p.mode_spacing = delta_omega;
    p.mode_coupling = g;
    p.perturbation = epsilon;
    p.cavity_coupling = cavity_coupling;
    return p;
  }

  // Resolved coupling for single-coupling experiments (echo uses one value per
  // listed ratio; this is the first).
  double resolved_omega() const {
    if (omega_abs) return *omega_abs;
    if (!omega_ratios.empty())
      return omega_ratios.front() * base_params(0.0).critical_coupling();
    return 0.0;
  }
};

// Absolute cavity coupling used by the length sweep when none is given; sits
// between the critical couplings of the default length pair so the sweep
// crosses the transition.
inline constexpr double kDefaultLengthSweepOmega = 1e-2;

namespace detail {

inline std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

inline double parse_double(const std::string& text, const std::string& key, int line) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || ptr != t.data() + t.size())
    throw ConfigError("malformed number '" + t + "' for key '" + key + "'", line);
  return value;
}

inline long parse_long(const std::string& text, const std::string& key, int line) {
  const std::string t = trim(text);
  long value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || ptr != t.data() + t.size())
    throw ConfigError("malformed integer '" + t + "' for key '" + key + "'", line);
  return value;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string::size_type begin = 0;
  while (true) {
    const auto end = s.find(sep, begin);
    parts.push_back(s.substr(begin, end - begin));
    if (end == std::string::npos) break;
    begin = end + 1;
  }
  return parts;
}

// Comma list `a,b,c` or range `start:step:stop` (inclusive stop).
inline std::vector<double> parse_list(const std::string& text, const std::string& key,
                                      int line) {
  const std::string t = trim(text);
  std::vector<double> values;
  if (t.find(':') != std::string::npos) {
    const auto parts = split(t, ':');
    if (parts.size() != 3)
      throw ConfigError("range for key '" + key + "' must be start:step:stop", line);
    const double start = parse_double(parts[0], key, line);
    const double step = parse_double(parts[1], key, line);
    const double stop = parse_double(parts[2], key, line);
    if (!(step > 0.0) || stop < start)
      throw ConfigError("range for key '" + key + "' must have step > 0 and stop >= start",
                        line);
    for (int k = 0;; ++k) {
      const double v = start + step * k;
      if (v > stop + 1e-12 * std::max(1.0, std::abs(stop))) break;
      values.push_back(v);
    }
  } else {
    for (const auto& part : split(t, ','))
      values.push_back(parse_double(part, key, line));
  }
  if (values.empty()) throw ConfigError("empty list for key '" + key + "'", line);
  return values;
}

inline ExperimentKind parse_kind(const std::string& text, int line) {
  const std::string t = trim(text);
  if (t == "echo") return ExperimentKind::Echo;
  if (t == "return") return ExperimentKind::Return;
  if (t == "omega-sweep") return ExperimentKind::OmegaSweep;
  if (t == "length-sweep") return ExperimentKind::LengthSweep;
  throw ConfigError("unknown experiment '" + t +
                    "' (expected echo|return|omega-sweep|length-sweep)", line);
}

inline OutputFormat parse_format(const std::string& text, int line) {
  const std::string t = trim(text);
  if (t == "csv") return OutputFormat::Csv;
  if (t == "json") return OutputFormat::Json;
  throw ConfigError("unknown format '" + t + "' (expected csv|json)", line);
}

inline ModePolicy parse_policy(const std::string& text, int line) {
  const std::string t = trim(text);
  if (t == "fixed-n") return ModePolicy::FixedN;
  if (t == "fixed-band") return ModePolicy::FixedBand;
  throw ConfigError("unknown policy '" + t + "' (expected fixed-n|fixed-band)", line);
}

}  // namespace detail

// Tracks which keys were given explicitly, for cross-field rules and for
// attributing constraint violations to source lines.
using KeyLines = std::map<std::string, int>;

// Cross-field resolution and constraint validation. Canonicalizes the coupling
// choice per experiment kind and rejects inconsistent settings; violations are
// attributed to the offending key's line when known.
inline RunConfig resolve_config(RunConfig config, const KeyLines& lines = {}) {
  const auto line_of = [&](const std::string& key) {
    const auto it = lines.find(key);
    return it == lines.end() ? 0 : it->second;
  };
  const bool ratio_given = lines.count("omega_ratio") > 0;
  const bool abs_given = lines.count("omega_abs") > 0;

  if (ratio_given && abs_given)
    throw ConfigError("omega_ratio and omega_abs are mutually exclusive",
                      line_of("omega_abs"));

  switch (config.experiment) {
    case ExperimentKind::Echo:
    case ExperimentKind::Return:
      if (config.omega_abs) config.omega_ratios.clear();
      if (config.experiment == ExperimentKind::Return && config.omega_ratios.size() > 1)
        throw ConfigError("return takes a single omega_ratio", line_of("omega_ratio"));
      if (!config.omega_abs && config.omega_ratios.empty())
        throw ConfigError("echo/return need omega_ratio or omega_abs", 0);
      break;
    case ExperimentKind::OmegaSweep:
      if (ratio_given || abs_given)
        throw ConfigError("omega-sweep derives the coupling from 'ratios'; omega_ratio/"
                          "omega_abs do not apply",
                          ratio_given ? line_of("omega_ratio") : line_of("omega_abs"));
      config.omega_ratios.clear();
      config.omega_abs.reset();
      break;
    case ExperimentKind::LengthSweep:
      if (ratio_given)
        throw ConfigError("length-sweep pins an absolute coupling; use omega_abs",
                          line_of("omega_ratio"));
      config.omega_ratios.clear();
      if (!config.omega_abs) config.omega_abs = kDefaultLengthSweepOmega;
      break;
  }

  for (double r : config.omega_ratios)
    if (!(r >= 0.0))
      throw ConfigError("omega_ratio must be non-negative", line_of("omega_ratio"));
  if (config.omega_abs && !(*config.omega_abs > 0.0))
    throw ConfigError("omega_abs must be positive", line_of("omega_abs"));

  // Structural parameter constraints, attributed to their source line.
  try {
    validate_params(config.base_params(config.resolved_omega()));
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    const std::pair<const char*, const char*> field_keys[] = {
        {"omega0", "omega0"},
        {"n_modes", "n_modes"},
        {"g (", "g"},
        {"delta_omega", "delta_omega"},
        {"omega (", config.omega_abs ? "omega_abs" : "omega_ratio"},
        {"epsilon", "epsilon"},
    };
    for (const auto& [prefix, key] : field_keys)
      if (what.rfind(prefix, 0) == 0) throw ConfigError(what, line_of(key));
    throw ConfigError(what, 0);
  }

  if (!(config.t_max > 0.0)) throw ConfigError("t_max must be positive", line_of("t_max"));
  if (!(config.dt > 0.0)) throw ConfigError("dt must be positive", line_of("dt"));
  if (config.experiment == ExperimentKind::OmegaSweep ||
      config.experiment == ExperimentKind::LengthSweep) {
    if (config.t_max < config.avg_t0 + config.avg_m)
      throw ConfigError("sweeps require t_max >= avg_t0 + avg_m (averaging window)",
                        line_of("t_max"));
  }
  if (config.band_width && !(*config.band_width > 0.0))
    throw ConfigError("band_width must be positive", line_of("band_width"));
  return config;
}

// Parses the line-oriented `key = value` format. `#` starts a comment; blank
// lines are skipped; unknown and duplicate keys are rejected with their line
// number. The returned config is fully resolved and validated.
inline RunConfig parse_config(const std::string& text, KeyLines* lines_out = nullptr) {
  static const std::set<std::string> kKnownKeys = {
      "experiment", "label",   "omega0",     "n_modes",  "delta_omega", "g",
      "epsilon",    "omega_ratio", "omega_abs", "initial", "t_max",     "dt",
      "avg_t0",     "avg_m",   "ratios",     "lengths",  "policy",      "band_width",
      "threads",    "out",     "format"};

  RunConfig config;
  KeyLines lines;
  int line_number = 0;
  std::string::size_type begin = 0;
  while (begin <= text.size()) {
    const auto end = text.find('\n', begin);
    std::string line = text.substr(begin, end == std::string::npos ? end : end - begin);
    begin = end == std::string::npos ? text.size() + 1 : end + 1;
    ++line_number;

    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = detail::trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected 'key = value'", line_number);
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (!kKnownKeys.count(key)) throw ConfigError("unknown key '" + key + "'", line_number);
    if (lines.count(key)) throw ConfigError("duplicate key '" + key + "'", line_number);
    lines[key] = line_number;

    try {
      if (key == "experiment") config.experiment = detail::parse_kind(value, line_number);
      else if (key == "label") config.label = value;
      else if (key == "omega0") config.omega0 = detail::parse_double(value, key, line_number);
      else if (key == "n_modes")
        config.n_modes = static_cast<int>(detail::parse_long(value, key, line_number));
      else if (key == "delta_omega")
        config.delta_omega = detail::parse_double(value, key, line_number);
      else if (key == "g") config.g = detail::parse_double(value, key, line_number);
      else if (key == "epsilon") config.epsilon = detail::parse_double(value, key, line_number);
      else if (key == "omega_ratio")
        config.omega_ratios = detail::parse_list(value, key, line_number);
      else if (key == "omega_abs")
        config.omega_abs = detail::parse_double(value, key, line_number);
      else if (key == "initial") config.initial = initial_state_from_string(detail::trim(value));
      else if (key == "t_max") config.t_max = detail::parse_double(value, key, line_number);
      else if (key == "dt") config.dt = detail::parse_double(value, key, line_number);
      else if (key == "avg_t0") config.avg_t0 = detail::parse_double(value, key, line_number);
      else if (key == "avg_m")
        config.avg_m = static_cast<int>(detail::parse_long(value, key, line_number));
      else if (key == "ratios") config.sweep_ratios = detail::parse_list(value, key, line_number);
      else if (key == "lengths") config.lengths = detail::parse_list(value, key, line_number);
      else if (key == "policy") config.policy = detail::parse_policy(value, line_number);
      else if (key == "band_width")
        config.band_width = detail::parse_double(value, key, line_number);
      else if (key == "threads")
        config.threads = static_cast<unsigned>(detail::parse_long(value, key, line_number));
      else if (key == "out") config.out_path = value;
      else if (key == "format") config.format = detail::parse_format(value, line_number);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what(), line_number);
    }
  }

  if (lines_out) *lines_out = lines;
  return resolve_config(std::move(config), lines);
}

}  // namespace echosim
