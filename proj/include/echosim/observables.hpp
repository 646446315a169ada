// observables.hpp — diagnostics over trajectories: Loschmidt echo, return
// probability, photon-number variance, windowed time averages, peak-period
// detection and early-time decay fitting.
//
// All series share the trajectory grid; windows and rates below are expressed
// in grid units (round trips T_B for experiment output).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "echosim/propagator.hpp"

namespace echosim {

struct ObservableSeries {
  TimeGrid grid;
  std::vector<double> values;
};

// ------------------------------- overlaps -----------------------------------

// L(t) = |<psi_perturbed(t)|psi_unperturbed(t)>|^2 for two evolutions of the
// same initial state under the unperturbed and perturbed Hamiltonians.
// Symmetric under swapping the arguments.
inline ObservableSeries loschmidt_echo(const Trajectory& unperturbed,
                                       const Trajectory& perturbed) {
  if (!(unperturbed.grid == perturbed.grid))
    throw std::invalid_argument("loschmidt_echo: trajectories use different grids");
  if (unperturbed.dimension() != perturbed.dimension())
    throw std::invalid_argument("loschmidt_echo: dimension mismatch");
  ObservableSeries series{unperturbed.grid, std::vector<double>(unperturbed.grid.count)};
  for (std::size_t k = 0; k < series.grid.count; ++k) {
    const std::complex<double> overlap = perturbed.state(k).dot(unperturbed.state(k));
    series.values[k] = std::norm(overlap);
  }
  return series;
}

// p(t) = |<psi0|psi(t)>|^2, the probability of return to the initial state.
inline ObservableSeries return_probability(const Trajectory& traj, const StateVector& psi0) {
  if (psi0.size() != traj.dimension())
    throw std::invalid_argument("return_probability: dimension mismatch");
  ObservableSeries series{traj.grid, std::vector<double>(traj.grid.count)};
  for (std::size_t k = 0; k < series.grid.count; ++k)
    series.values[k] = std::norm(psi0.dot(traj.state(k)));
  return series;
}

// Variance of the cavity-1 photon number in the single-excitation sector:
// y - y^2 with y = |C_cavity1(t)|^2. Bounded by [0, 1/4].
inline ObservableSeries photon_variance_a1(const Trajectory& traj) {
  ObservableSeries series{traj.grid, std::vector<double>(traj.grid.count)};
  for (std::size_t k = 0; k < series.grid.count; ++k) {
    const double y = std::norm(traj.states(kCavity1, static_cast<Eigen::Index>(k)));
    series.values[k] = y - y * y;
  }
  return series;
}

// ---------------------------- windowed averages ------------------------------

namespace detail {

// Trapezoidal integral of the piecewise-linear series over [a, b]. Endpoints
// are interpolated so the result is exact for windows not aligned with the
// grid; constant series integrate to c*(b-a) exactly.
inline double integrate_window(const ObservableSeries& s, double a, double b) {
  const TimeGrid& g = s.grid;
  const double slack = 1e-9 * std::max(1.0, g.dt);
  if (!(b > a)) throw std::invalid_argument("window is empty or reversed");
  if (a < g.t_start - slack || b > g.t_end() + slack)
    throw std::invalid_argument("window exceeds series span");
  if (g.count < 2) throw std::invalid_argument("series too short to integrate");
  a = std::clamp(a, g.t_start, g.t_end());
  b = std::clamp(b, g.t_start, g.t_end());

  const auto cell = [&](double t) {
    auto i = static_cast<std::ptrdiff_t>(std::floor((t - g.t_start) / g.dt));
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(
        i, 0, static_cast<std::ptrdiff_t>(g.count) - 2));
  };
  const auto value_at = [&](double t, std::size_t i) {
    const double f = (t - g.time(i)) / g.dt;
    return s.values[i] * (1.0 - f) + s.values[i + 1] * f;
  };

  const std::size_t ia = cell(a);
  const std::size_t ib = cell(b);
  if (ia == ib)
    return 0.5 * (value_at(a, ia) + value_at(b, ia)) * (b - a);

  double total = 0.5 * (value_at(a, ia) + s.values[ia + 1]) * (g.time(ia + 1) - a);
  for (std::size_t i = ia + 1; i < ib; ++i)
    total += 0.5 * (s.values[i] + s.values[i + 1]) * g.dt;
  total += 0.5 * (s.values[ib] + value_at(b, ib)) * (b - g.time(ib));
  return total;
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace detail

// Trapezoidal mean over [t_lo, t_hi].
inline double window_mean(const ObservableSeries& series, double t_lo, double t_hi) {
  return detail::integrate_window(series, t_lo, t_hi) / (t_hi - t_lo);
}

// Time-averaged variance over [t0, t0 + m] round trips, normalized by the
// window length so the result stays in [0, 1/4]. Requires a late window well
// past the transient: t0 >= 100 round trips and m >= 100.
inline double time_averaged_variance(const ObservableSeries& series, double t0, int m) {
  if (t0 < 100.0)
    throw std::invalid_argument("averaging window must start at t0 >= 100 round trips");
  if (m < 100)
    throw std::invalid_argument("averaging window must cover m >= 100 round trips");
  return detail::integrate_window(series, t0, t0 + m) / static_cast<double>(m);
}

// ----------------------------- period detection ------------------------------

struct PeriodEstimate {
  double period = 0.0;             // median spacing of detected maxima, grid units
  std::vector<double> peak_times;  // strictly increasing
  double confidence = 0.0;         // MAD of spacings / median spacing; 0 = regular
};

// Local maxima with prominence >= min_prominence and pairwise separation
// >= min_separation. Returns nullopt when fewer than 3 peaks qualify (no
// periodic structure). The series must span at least 20 round trips.
inline std::optional<PeriodEstimate> detect_peak_period(const ObservableSeries& series,
                                                        double min_prominence = 0.2,
                                                        double min_separation = 0.5) {
  const auto& v = series.values;
  const std::size_t n = v.size();
  if (series.grid.span() < 20.0 - 1e-9)
    throw std::invalid_argument("detect_peak_period: series must span >= 20 round trips");

  // Prominence of a strict local maximum: height above the higher of the two
  // valley floors reached before a taller sample on each side.
  std::vector<std::size_t> kept_candidates;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(v[i] > v[i - 1] && v[i] > v[i + 1])) continue;
    const double h = v[i];
    double left_floor = h;
    for (std::size_t j = i; j > 0;) {
      --j;
      if (v[j] > h) break;
      left_floor = std::min(left_floor, v[j]);
    }
    double right_floor = h;
    for (std::size_t j = i + 1; j < n && v[j] <= h; ++j)
      right_floor = std::min(right_floor, v[j]);
    if (h - std::max(left_floor, right_floor) >= min_prominence)
      kept_candidates.push_back(i);
  }

  // Enforce separation, keeping taller peaks first (ties: earlier sample).
  std::vector<std::size_t> order = kept_candidates;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
  std::vector<std::size_t> kept;
  for (std::size_t i : order) {
    const double t = series.grid.time(i);
    const bool clear = std::none_of(kept.begin(), kept.end(), [&](std::size_t k) {
      return std::abs(series.grid.time(k) - t) < min_separation;
    });
    if (clear) kept.push_back(i);
  }
  std::sort(kept.begin(), kept.end());

  if (kept.size() < 3) return std::nullopt;

  PeriodEstimate estimate;
  estimate.peak_times.reserve(kept.size());
  for (std::size_t i : kept) estimate.peak_times.push_back(series.grid.time(i));
  std::vector<double> spacings(estimate.peak_times.size() - 1);
  for (std::size_t i = 0; i + 1 < estimate.peak_times.size(); ++i)
    spacings[i] = estimate.peak_times[i + 1] - estimate.peak_times[i];
  estimate.period = detail::median(spacings);
  std::vector<double> deviations(spacings.size());
  for (std::size_t i = 0; i < spacings.size(); ++i)
    deviations[i] = std::abs(spacings[i] - estimate.period);
  estimate.confidence = detail::median(deviations) / estimate.period;
  return estimate;
}

// ------------------------------- decay fitting -------------------------------

// Least-squares slope of ln(values) against time over [t_lo, t_hi], negated.
// The rate is in inverse grid units. All samples in the window must be
// positive.
inline double fit_decay_rate(const ObservableSeries& series, double t_lo, double t_hi) {
  if (!(t_hi > t_lo)) throw std::invalid_argument("fit_decay_rate: empty window");
  double sum_t = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < series.grid.count; ++k) {
    const double t = series.grid.time(k);
    if (t < t_lo - 1e-12 || t > t_hi + 1e-12) continue;
    if (!(series.values[k] > 0.0))
      throw std::invalid_argument("fit_decay_rate: non-positive value in window");
    sum_t += t;
    ++count;
  }
  if (count < 2) throw std::invalid_argument("fit_decay_rate: fewer than 2 samples in window");

  const double mean_t = sum_t / static_cast<double>(count);
  double stt = 0.0;
  double sty = 0.0;
  for (std::size_t k = 0; k < series.grid.count; ++k) {
    const double t = series.grid.time(k);
    if (t < t_lo - 1e-12 || t > t_hi + 1e-12) continue;
    const double dt = t - mean_t;
    stt += dt * dt;
    sty += dt * std::log(series.values[k]);
  }
  return -sty / stt;
}

}  // namespace echosim
