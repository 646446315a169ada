// runner.hpp — turns a resolved RunConfig into data files: dispatches the
// experiment, writes the table to the configured sink, and emits the manifest.
// Summary lines go to the log stream (the CLI points this at stderr so a
// stdout table stays clean).

#pragma once

#include <chrono>
#include <fstream>
#include <iostream>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "echosim/config.hpp"
#include "echosim/experiments.hpp"
#include "echosim/io.hpp"

namespace echosim {

namespace detail {

inline ExperimentSpec spec_from_config(const RunConfig& config, double cavity_coupling) {
  ExperimentSpec spec;
  spec.params = config.base_params(cavity_coupling);
  spec.initial = config.initial;
  spec.t_max = config.t_max;
  spec.dt = config.dt;
  spec.averaging = {config.avg_t0, config.avg_m};
  spec.label = config.label;
  return spec;
}

inline void write_text(const std::string& path, const std::string& payload) {
  if (path.empty()) {
    std::cout << payload;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  out << payload;
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace detail

// Runs the configured experiment and writes its outputs. The config must come
// from parse_config/resolve_config. Returns the process exit code (0).
inline int run_experiment(const RunConfig& config, std::ostream& log = std::cerr) {
  const auto started = std::chrono::steady_clock::now();

  const SystemParams base = config.base_params(config.resolved_omega());
  log << kToolName << ' ' << kVersion << ": " << to_string(config.experiment)
      << "  T_B=" << format_g15(base.round_trip_time())
      << " omega_tc=" << format_g15(base.critical_coupling())
      << " D=" << base.dimension() << '\n';

  std::string payload;
  if (config.experiment == ExperimentKind::Echo) {
    std::vector<ObservableSeries> columns;
    std::vector<std::string> labels;
    if (config.omega_abs) {
      columns.push_back(run_echo_experiment(detail::spec_from_config(config, *config.omega_abs)).echo);
      labels.push_back("L");
    } else {
      for (double ratio : config.omega_ratios) {
        columns.push_back(
            run_echo_experiment(
                detail::spec_from_config(config, ratio * base.critical_coupling()))
                .echo);
        labels.push_back(config.omega_ratios.size() == 1 ? "L" : "L_ratio_" + format_g15(ratio));
      }
    }
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (config.t_max >= config.avg_t0 + config.avg_m)
        log << "  " << labels[i] << " window mean [" << format_g15(config.avg_t0) << ","
            << format_g15(config.avg_t0 + config.avg_m)
            << "]: " << format_g15(window_mean(columns[i], config.avg_t0,
                                               config.avg_t0 + config.avg_m))
            << '\n';
    const RunManifest manifest = make_manifest(config);
    if (config.format == OutputFormat::Csv) {
      std::ostringstream out;
      write_series_csv(out, columns, labels);
      payload = out.str();
    } else {
      payload = series_to_json(columns, labels, manifest_to_json(manifest, false)).dump(2);
      payload += '\n';
    }
  } else if (config.experiment == ExperimentKind::Return) {
    const double coupling =
        config.omega_abs ? *config.omega_abs
                         : config.omega_ratios.front() * base.critical_coupling();
    const ReturnRun run = run_return_experiment(detail::spec_from_config(config, coupling));
    if (run.period)
      log << "  period: " << format_g15(run.period->period)
          << " T_B (confidence " << format_g15(run.period->confidence) << ")\n";
    else
      log << "  period: no periodic structure\n";
    log << "  early decay rate: " << format_g15(run.decay_rate) << " omega0 ("
        << format_g15(run.decay_rate * base.round_trip_time()) << " per T_B)"
        << "  gamma estimate: " << format_g15(base.transfer_rate()) << " omega0\n";
    const std::vector<ObservableSeries> columns{run.probability};
    const std::vector<std::string> labels{"p"};
    const RunManifest manifest = make_manifest(config);
    if (config.format == OutputFormat::Csv) {
      std::ostringstream out;
      write_series_csv(out, columns, labels);
      payload = out.str();
    } else {
      payload = series_to_json(columns, labels, manifest_to_json(manifest, false)).dump(2);
      payload += '\n';
    }
  } else {
    SweepResult sweep;
    if (config.experiment == ExperimentKind::OmegaSweep) {
      sweep = omega_sweep(detail::spec_from_config(config, 0.0), config.sweep_ratios,
                          config.threads);
    } else {
      const ExperimentSpec reference = detail::spec_from_config(config, *config.omega_abs);
      std::vector<double> l_ratios;
      l_ratios.reserve(config.lengths.size());
      for (double l : config.lengths)
        l_ratios.push_back(l / reference.params.length_over_lambda0());
      sweep = length_sweep(reference, l_ratios, *config.omega_abs, config.policy,
                           config.band_width.value_or(0.0), config.threads);
    }
    log << "  " << sweep.rows.size() << " points, argmax avg_variance at "
        << sweep.axis_label << " = " << format_g15(sweep.argmax_variance_axis()) << '\n';
    const RunManifest manifest = make_manifest(config);
    if (config.format == OutputFormat::Csv) {
      std::ostringstream out;
      write_sweep_csv(out, sweep);
      payload = out.str();
    } else {
      payload = sweep_to_json(sweep, manifest_to_json(manifest, false)).dump(2);
      payload += '\n';
    }
  }

  detail::write_text(config.out_path, payload);

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  if (!config.out_path.empty() && config.format == OutputFormat::Csv) {
    const RunManifest manifest = make_manifest(config, wall);
    detail::write_text(config.out_path + ".manifest.json",
                       manifest_to_json(manifest, true).dump(2) + "\n");
  }
  log << "  done in " << format_g15(wall) << " s"
      << (config.out_path.empty() ? "" : " -> " + config.out_path) << '\n';
  return 0;
}

}  // namespace echosim
