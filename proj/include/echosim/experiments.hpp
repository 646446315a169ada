// experiments.hpp — full simulation runs and parameter sweeps: echo and
// return-probability experiments at fixed parameters, coupling sweeps locating
// the variance maximum, length sweeps across the ergodicity transition, and
// regime classification.
//
// Sweep points are independent pure computations; the harness may evaluate
// them on a small thread pool and always assembles results in axis order, so
// identical inputs produce bit-identical results regardless of thread count.

#pragma once

#include <atomic>
#include <cmath>
#include <cstddef>
#include <limits>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "echosim/model.hpp"
#include "echosim/observables.hpp"
#include "echosim/propagator.hpp"

namespace echosim {

// Default window for the early-time decay fit, in round trips: past the
// quadratic onset at t ~ 0, before the first reverse flow.
inline constexpr double kDecayFitStart = 0.05;
inline constexpr double kDecayFitEnd = 0.4;

// Classification thresholds: period doubling within 10% of two round trips,
// late-window echo mean at least 1/2.
inline constexpr double kPeriodDoubledLo = 1.8;
inline constexpr double kPeriodDoubledHi = 2.2;
inline constexpr double kStableEchoMean = 0.5;

struct AveragingWindow {
  double t0 = 200.0;  // round trips
  int m = 200;        // window length, round trips
};

struct ExperimentSpec {
  SystemParams params;
  InitialState initial = InitialState::Cavity1;
  double t_max = 400.0;  // round trips
  double dt = 0.01;      // round trips
  std::optional<double> epsilon_override;
  AveragingWindow averaging;
  std::string label;

  double effective_epsilon() const {
    return epsilon_override ? *epsilon_override : params.perturbation;
  }
};

namespace detail {

inline ExperimentSpec validated_spec(ExperimentSpec spec) {
  validate_params(spec.params);
  if (!(spec.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(spec.t_max > 0.0)) throw std::invalid_argument("t_max must be positive");
  if (spec.epsilon_override && !(std::abs(*spec.epsilon_override) < 1.0))
    throw std::invalid_argument("epsilon override must satisfy |epsilon| < 1");
  return spec;
}

inline TimeGrid grid_for(const ExperimentSpec& spec) {
  return TimeGrid::from_range(0.0, spec.t_max, spec.dt, spec.params.round_trip_time());
}

// Minimal thread-pool map over [0, n); fn(i) must only touch slot i.
template <typename Fn>
void parallel_for_index(std::size_t n, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& worker : pool) worker.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace detail

// ---------------------------- fixed-parameter runs ---------------------------

struct EchoRun {
  ObservableSeries echo;
  Trajectory unperturbed;
  Trajectory perturbed;
};

// Evolves the same initial state under H(eps = 0) and H(eps != 0) on one grid
// and returns L(t) together with both trajectories.
inline EchoRun run_echo_experiment(const ExperimentSpec& raw) {
  const ExperimentSpec spec = detail::validated_spec(raw);
  SystemParams perturbed_params = spec.params;
  perturbed_params.perturbation = spec.effective_epsilon();

  const TimeGrid grid = detail::grid_for(spec);
  const StateVector psi0 = make_initial_state(spec.initial, spec.params.dimension());
  const EigenSystem eig0 = diagonalize(assemble_hamiltonian(spec.params, false));
  const EigenSystem eig1 = diagonalize(assemble_hamiltonian(perturbed_params, true));

  EchoRun run{{}, evolve_on_grid(eig0, psi0, grid), evolve_on_grid(eig1, psi0, grid)};
  run.echo = loschmidt_echo(run.unperturbed, run.perturbed);
  return run;
}

struct ReturnRun {
  ObservableSeries probability;
  std::optional<PeriodEstimate> period;
  double decay_rate = 0.0;  // natural units (multiples of omega0)
};

// Prominence floor scaled to the signal's swing, clamped below at 0.02. Deep
// in the non-ergodic regime the revival dips are only ~4*(Omega/g)^2 deep, so
// a fixed floor of 0.2 would miss the period doubling the regime is defined
// by; ripple rejection still scales with the visible structure.
inline double adaptive_prominence(const ObservableSeries& series) {
  double lo = series.values.front();
  double hi = lo;
  for (double v : series.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return std::min(0.2, std::max(0.02, 0.2 * (hi - lo)));
}

// Unperturbed evolution only: p(t), its peak period, and the early-time decay
// rate fitted over the default window.
inline ReturnRun run_return_experiment(const ExperimentSpec& raw) {
  const ExperimentSpec spec = detail::validated_spec(raw);
  const TimeGrid grid = detail::grid_for(spec);
  const StateVector psi0 = make_initial_state(spec.initial, spec.params.dimension());
  const EigenSystem eig = diagonalize(assemble_hamiltonian(spec.params, false));
  const Trajectory traj = evolve_on_grid(eig, psi0, grid);

  ReturnRun run;
  run.probability = return_probability(traj, psi0);
  run.period = detect_peak_period(run.probability, adaptive_prominence(run.probability));
  const double rate_per_round_trip =
      fit_decay_rate(run.probability, kDecayFitStart, kDecayFitEnd);
  run.decay_rate = rate_per_round_trip / spec.params.round_trip_time();
  return run;
}

// ------------------------------ classification -------------------------------

enum class Regime { TimeCrystal, Normal };

struct RegimeLabel {
  Regime regime = Regime::Normal;
  double period_over_tb = std::numeric_limits<double>::quiet_NaN();
  double echo_mean = 0.0;
};

inline const char* to_string(Regime r) {
  return r == Regime::TimeCrystal ? "time-crystal" : "normal";
}

// Time-crystal iff the return-probability period is doubled (within 10% of
// 2 round trips) AND the late-window echo mean shows perturbation stability.
inline RegimeLabel classify_regime(const std::optional<PeriodEstimate>& period,
                                   double echo_mean) {
  RegimeLabel label;
  label.echo_mean = echo_mean;
  if (period) label.period_over_tb = period->period;
  const bool doubled =
      period && period->period >= kPeriodDoubledLo && period->period <= kPeriodDoubledHi;
  label.regime =
      (doubled && echo_mean >= kStableEchoMean) ? Regime::TimeCrystal : Regime::Normal;
  return label;
}

// --------------------------------- sweeps ------------------------------------

struct SweepRow {
  double axis = 0.0;  // swept value: coupling ratio or length in lambda0 units
  SystemParams params;
  double avg_variance = 0.0;
  double echo_mean = 0.0;
  std::optional<double> period_over_tb;
  RegimeLabel regime;
  double gamma = 0.0;  // transfer rate, natural units
};

struct SweepResult {
  std::string axis_label;
  std::vector<SweepRow> rows;
  std::size_t argmax_index = 0;  // row maximizing avg_variance; ties -> smallest axis

  double argmax_variance_axis() const { return rows.at(argmax_index).axis; }
};

namespace detail {

// Shared per-point evaluation: one echo experiment plus return-probability and
// variance diagnostics on the unperturbed trajectory.
inline SweepRow evaluate_sweep_point(const ExperimentSpec& spec, double axis_value) {
  const EchoRun echo_run = run_echo_experiment(spec);
  const StateVector psi0 = make_initial_state(spec.initial, spec.params.dimension());
  const ObservableSeries probability = return_probability(echo_run.unperturbed, psi0);
  const ObservableSeries variance = photon_variance_a1(echo_run.unperturbed);

  SweepRow row;
  row.axis = axis_value;
  row.params = spec.params;
  row.avg_variance = time_averaged_variance(variance, spec.averaging.t0, spec.averaging.m);
  row.echo_mean = window_mean(echo_run.echo, spec.averaging.t0,
                              spec.averaging.t0 + spec.averaging.m);
  const auto period = detect_peak_period(probability, adaptive_prominence(probability));
  if (period) row.period_over_tb = period->period;
  row.regime = classify_regime(period, row.echo_mean);
  row.gamma = spec.params.transfer_rate();
  return row;
}

inline void finalize_argmax(SweepResult& result) {
  for (std::size_t i = 1; i < result.rows.size(); ++i)
    if (result.rows[i].avg_variance > result.rows[result.argmax_index].avg_variance)
      result.argmax_index = i;
}

}  // namespace detail

// Sweep of the cavity-cavity coupling, expressed as ratios of the critical
// coupling. Ratios must be strictly increasing in (0, 10].
inline SweepResult omega_sweep(const ExperimentSpec& base, const std::vector<double>& ratios,
                               unsigned threads = 1) {
  if (ratios.empty()) throw std::invalid_argument("omega_sweep: empty ratio list");
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    if (!(ratios[i] > 0.0 && ratios[i] <= 10.0))
      throw std::invalid_argument("omega_sweep: ratios must lie in (0, 10]");
    if (i > 0 && !(ratios[i] > ratios[i - 1]))
      throw std::invalid_argument("omega_sweep: ratios must be strictly increasing");
  }
  detail::validated_spec(base);

  SweepResult result{"omega_over_omega_tc", std::vector<SweepRow>(ratios.size()), 0};
  detail::parallel_for_index(ratios.size(), threads, [&](std::size_t i) {
    ExperimentSpec spec = base;
    spec.params.cavity_coupling = ratios[i] * base.params.critical_coupling();
    result.rows[i] = detail::evaluate_sweep_point(spec, ratios[i]);
  });
  detail::finalize_argmax(result);
  return result;
}

enum class ModePolicy {
  FixedN,    // keep the reference mode count at every length
  FixedBand  // keep the comb bandwidth: N = 2*floor(W/(2*delta_omega))
};

// Sweep of the ring length. Each point rescales (delta_omega, g) through
// scale_to_length, pins the cavity coupling to an absolute value, and sets the
// mode count per policy. band_width <= 0 selects the reference comb width
// N_ref * delta_omega_ref. The axis records l/lambda0, sorted ascending.
inline SweepResult length_sweep(const ExperimentSpec& reference,
                                const std::vector<double>& l_ratios, double omega_absolute,
                                ModePolicy policy, double band_width = 0.0,
                                unsigned threads = 1) {
  if (l_ratios.empty()) throw std::invalid_argument("length_sweep: empty length list");
  for (double r : l_ratios)
    if (!(r > 0.0)) throw std::invalid_argument("length_sweep: length ratios must be positive");
  if (!(omega_absolute > 0.0))
    throw std::invalid_argument("length_sweep: absolute cavity coupling must be positive");
  detail::validated_spec(reference);
  const double width = band_width > 0.0
                           ? band_width
                           : reference.params.n_modes * reference.params.mode_spacing;

  std::vector<double> ratios = l_ratios;
  std::sort(ratios.begin(), ratios.end());
  for (std::size_t i = 1; i < ratios.size(); ++i)
    if (ratios[i] == ratios[i - 1])
      throw std::invalid_argument("length_sweep: duplicate length " +
                                  std::to_string(ratios[i]));

  SweepResult result{"l_over_lambda0", std::vector<SweepRow>(ratios.size()), 0};
  detail::parallel_for_index(ratios.size(), threads, [&](std::size_t i) {
    ExperimentSpec spec = reference;
    spec.params = scale_to_length(reference.params, ratios[i]);
    spec.params.cavity_coupling = omega_absolute;
    if (policy == ModePolicy::FixedBand) {
      // tiny guard keeps exact band/spacing ratios off the floor knife edge
      const int n = 2 * static_cast<int>(
                            std::floor(width / (2.0 * spec.params.mode_spacing) + 1e-9));
      if (n < 2)
        throw std::invalid_argument("length_sweep: fixed-band policy yields fewer than 2 modes"
                                    " at length ratio " + std::to_string(ratios[i]));
      spec.params.n_modes = n;
    }
    result.rows[i] = detail::evaluate_sweep_point(spec, spec.params.length_over_lambda0());
  });
  detail::finalize_argmax(result);
  return result;
}

// True when the curve's global maximum sits strictly inside the axis range and
// exceeds both endpoint values by at least `margin`.
inline bool has_interior_peak(const std::vector<double>& values, double margin = 0.02) {
  if (values.size() < 3) return false;
  std::size_t argmax = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[argmax]) argmax = i;
  if (argmax == 0 || argmax + 1 == values.size()) return false;
  return values[argmax] >= values.front() + margin && values[argmax] >= values.back() + margin;
}

}  // namespace echosim
