// io.hpp — serialization of series and sweeps into plot-ready CSV/JSON with a
// manifest carrying the full resolved configuration and derived scales.
//
// CSV data files hold only the numeric table (values at 15 significant
// digits); their manifest is written as a sibling `<out>.manifest.json`. JSON
// data files embed the manifest, minus the wall-clock field so identical runs
// produce byte-identical data files.

#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "echosim/config.hpp"
#include "echosim/experiments.hpp"
#include "echosim/observables.hpp"
#include "echosim/version.hpp"

namespace echosim {

using nlohmann::json;

inline std::string format_g15(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.15g", v);
  return buffer;
}

// -------------------------------- manifest ----------------------------------

struct RunManifest {
  RunConfig config;  // fully resolved
  double round_trip_time = 0.0;
  double critical_coupling = 0.0;
  double gamma = std::numeric_limits<double>::quiet_NaN();  // NaN for omega sweeps
  int dimension = 0;
  std::string version = kVersion;
  double wall_clock_seconds = 0.0;
};

inline RunManifest make_manifest(const RunConfig& config, double wall_clock_seconds = 0.0) {
  RunManifest m;
  m.config = config;
  const SystemParams base = config.base_params(config.resolved_omega());
  m.round_trip_time = base.round_trip_time();
  m.critical_coupling = base.critical_coupling();
  if (config.experiment != ExperimentKind::OmegaSweep) m.gamma = base.transfer_rate();
  m.dimension = base.dimension();
  m.wall_clock_seconds = wall_clock_seconds;
  return m;
}

inline json config_to_json(const RunConfig& c) {
  json j;
  j["experiment"] = to_string(c.experiment);
  j["label"] = c.label;
  j["omega0"] = c.omega0;
  j["n_modes"] = c.n_modes;
  j["delta_omega"] = c.delta_omega;
  j["g"] = c.g;
  j["epsilon"] = c.epsilon;
  j["omega_ratio"] = c.omega_ratios;
  if (c.omega_abs) j["omega_abs"] = *c.omega_abs;
  j["initial"] = to_string(c.initial);
  j["t_max"] = c.t_max;
  j["dt"] = c.dt;
  j["avg_t0"] = c.avg_t0;
  j["avg_m"] = c.avg_m;
  j["ratios"] = c.sweep_ratios;
  j["lengths"] = c.lengths;
  j["policy"] = to_string(c.policy);
  if (c.band_width) j["band_width"] = *c.band_width;
  j["threads"] = c.threads;
  j["out"] = c.out_path;
  j["format"] = to_string(c.format);
  return j;
}

inline RunConfig config_from_json(const json& j) {
  RunConfig c;
  c.experiment = detail::parse_kind(j.at("experiment").get<std::string>(), 0);
  c.label = j.at("label").get<std::string>();
  c.omega0 = j.at("omega0").get<double>();
  c.n_modes = j.at("n_modes").get<int>();
  c.delta_omega = j.at("delta_omega").get<double>();
  c.g = j.at("g").get<double>();
  c.epsilon = j.at("epsilon").get<double>();
  c.omega_ratios = j.at("omega_ratio").get<std::vector<double>>();
  if (j.contains("omega_abs")) c.omega_abs = j.at("omega_abs").get<double>();
  else c.omega_abs.reset();
  c.initial = initial_state_from_string(j.at("initial").get<std::string>());
  c.t_max = j.at("t_max").get<double>();
  c.dt = j.at("dt").get<double>();
  c.avg_t0 = j.at("avg_t0").get<double>();
  c.avg_m = j.at("avg_m").get<int>();
  c.sweep_ratios = j.at("ratios").get<std::vector<double>>();
  c.lengths = j.at("lengths").get<std::vector<double>>();
  c.policy = detail::parse_policy(j.at("policy").get<std::string>(), 0);
  if (j.contains("band_width")) c.band_width = j.at("band_width").get<double>();
  else c.band_width.reset();
  c.threads = j.at("threads").get<unsigned>();
  c.out_path = j.at("out").get<std::string>();
  c.format = detail::parse_format(j.at("format").get<std::string>(), 0);
  return c;
}

inline json manifest_to_json(const RunManifest& m, bool include_timing) {
  json j;
  j["tool"] = kToolName;
  j["version"] = m.version;
  j["config"] = config_to_json(m.config);
  json derived;
  derived["round_trip_time"] = m.round_trip_time;
  derived["critical_coupling"] = m.critical_coupling;
  if (!std::isnan(m.gamma)) derived["gamma"] = m.gamma;
  derived["dimension"] = m.dimension;
  j["derived"] = derived;
  if (include_timing) j["wall_clock_seconds"] = m.wall_clock_seconds;
  return j;
}

// Reconstructs the exact RunConfig a manifest was produced from.
inline RunConfig config_from_manifest(const json& manifest) {
  return config_from_json(manifest.at("config"));
}

// --------------------------------- series -----------------------------------

// CSV: header `t_over_TB,<label>...`, one row per sample, 15 significant
// digits. All series must share one grid.
inline void write_series_csv(std::ostream& out, std::span<const ObservableSeries> series,
                             std::span<const std::string> labels) {
  if (series.empty() || series.size() != labels.size())
    throw std::invalid_argument("write_series_csv: need one label per series");
  const TimeGrid& grid = series.front().grid;
  for (const auto& s : series)
    if (!(s.grid == grid))
      throw std::invalid_argument("write_series_csv: series use different grids");

  out << "t_over_TB";
  for (const auto& label : labels) out << ',' << label;
  out << '\n';
  for (std::size_t k = 0; k < grid.count; ++k) {
    out << format_g15(grid.time(k));
    for (const auto& s : series) out << ',' << format_g15(s.values[k]);
    out << '\n';
  }
  if (!out) throw std::runtime_error("write_series_csv: write failed");
}

inline json series_to_json(std::span<const ObservableSeries> series,
                           std::span<const std::string> labels, const json& manifest) {
  if (series.empty() || series.size() != labels.size())
    throw std::invalid_argument("series_to_json: need one label per series");
  const TimeGrid& grid = series.front().grid;
  for (const auto& s : series)
    if (!(s.grid == grid))
      throw std::invalid_argument("series_to_json: series use different grids");

  json j;
  j["grid"] = {{"t_start", grid.t_start},
               {"dt", grid.dt},
               {"count", grid.count},
               {"time_unit", grid.time_unit},
               {"unit", "T_B"}};
  j["columns"] = json::array();
  for (std::size_t i = 0; i < series.size(); ++i)
    j["columns"].push_back({{"label", labels[i]}, {"values", series[i].values}});
  j["manifest"] = manifest;
  return j;
}

struct SeriesFile {
  TimeGrid grid;
  std::vector<std::string> labels;
  std::vector<ObservableSeries> columns;
  json manifest;
};

inline SeriesFile read_series_json(std::istream& in) {
  json j = json::parse(in);
  SeriesFile file;
  file.grid = TimeGrid{j.at("grid").at("t_start").get<double>(),
                       j.at("grid").at("dt").get<double>(),
                       j.at("grid").at("count").get<std::size_t>(),
                       j.at("grid").at("time_unit").get<double>()};
  for (const auto& column : j.at("columns")) {
    file.labels.push_back(column.at("label").get<std::string>());
    file.columns.push_back(
        ObservableSeries{file.grid, column.at("values").get<std::vector<double>>()});
  }
  file.manifest = j.at("manifest");
  return file;
}

// --------------------------------- sweeps -----------------------------------

inline void write_sweep_csv(std::ostream& out, const SweepResult& sweep) {
  out << sweep.axis_label
      << ",avg_variance,echo_mean,period_over_TB,regime,gamma,is_argmax"
         ",omega0,omega,g,delta_omega,n_modes,epsilon\n";
  for (std::size_t i = 0; i < sweep.rows.size(); ++i) {
    const SweepRow& row = sweep.rows[i];
    const double period =
        row.period_over_tb ? *row.period_over_tb : std::numeric_limits<double>::quiet_NaN();
    out << format_g15(row.axis) << ',' << format_g15(row.avg_variance) << ','
        << format_g15(row.echo_mean) << ',' << format_g15(period) << ','
        << to_string(row.regime.regime) << ',' << format_g15(row.gamma) << ','
        << (i == sweep.argmax_index ? 1 : 0) << ',' << format_g15(row.params.omega0) << ','
        << format_g15(row.params.cavity_coupling) << ','
        << format_g15(row.params.mode_coupling) << ','
        << format_g15(row.params.mode_spacing) << ',' << row.params.n_modes << ','
        << format_g15(row.params.perturbation) << '\n';
  }
  if (!out) throw std::runtime_error("write_sweep_csv: write failed");
}

inline json sweep_to_json(const SweepResult& sweep, const json& manifest) {
  json j;
  j["axis_label"] = sweep.axis_label;
  j["argmax_axis"] = sweep.argmax_variance_axis();
  j["rows"] = json::array();
  for (std::size_t i = 0; i < sweep.rows.size(); ++i) {
    const SweepRow& row = sweep.rows[i];
    json r;
    r["axis"] = row.axis;
    r["avg_variance"] = row.avg_variance;
    r["echo_mean"] = row.echo_mean;
    if (row.period_over_tb) r["period_over_TB"] = *row.period_over_tb;
    else r["period_over_TB"] = nullptr;
    r["regime"] = to_string(row.regime.regime);
    r["gamma"] = row.gamma;
    r["is_argmax"] = (i == sweep.argmax_index);
    r["params"] = {{"omega0", row.params.omega0},
                   {"omega", row.params.cavity_coupling},
                   {"g", row.params.mode_coupling},
                   {"delta_omega", row.params.mode_spacing},
                   {"n_modes", row.params.n_modes},
                   {"epsilon", row.params.perturbation}};
    j["rows"].push_back(std::move(r));
  }
  j["manifest"] = manifest;
  return j;
}

}  // namespace echosim
