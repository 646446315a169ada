// model.hpp — physical parameters, basis conventions, and Hamiltonian assembly
// for two coupled single-mode cavities attached to a multimode ring resonator,
// restricted to the single-excitation sector.
//
// Conventions (natural units): hbar = 1, c = 1. Frequencies are multiples of
// the cavity frequency omega0; times are reported in multiples of the ring
// round-trip time T_B = 2*pi/mode_spacing. The dense basis ordering is
//   index 0      -> cavity 1
//   index 1      -> cavity 2
//   index 2 + k  -> resonator mode j = k - n_modes/2,  k = 0 .. n_modes
// so the state space has dimension n_modes + 3.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace echosim {

// Real symmetric by construction; all couplings in the model are real.
using HermitianMatrix = Eigen::MatrixXd;
using StateVector = Eigen::VectorXcd;

inline constexpr Eigen::Index kCavity1 = 0;
inline constexpr Eigen::Index kCavity2 = 1;
inline constexpr Eigen::Index kFirstMode = 2;

// ------------------------------- parameters ---------------------------------

struct SystemParams {
  double omega0 = 1.0;          // cavity frequency, the reference unit
  double cavity_coupling = 0.0; // cavity-cavity coupling, units of omega0
  double mode_coupling = 6e-3;  // cavity-2 <-> resonator-mode coupling
  double mode_spacing = 4e-3;   // comb spacing between adjacent mode frequencies
  int n_modes = 50;             // comb count parameter N; modes j = -N/2 .. N/2
  double perturbation = 1e-5;   // dimensionless frequency perturbation epsilon

  int dimension() const { return n_modes + 3; }

  // Round-trip (bypass) time of the ring, T_B = 2*pi/mode_spacing.
  double round_trip_time() const { return 2.0 * std::numbers::pi / mode_spacing; }

  // Critical cavity-cavity coupling separating the non-ergodic and ergodic
  // regimes, g/sqrt(2).
  double critical_coupling() const { return mode_coupling / std::numbers::sqrt2; }

  // Perturbative early-time rate of excitation transfer out of cavity 1,
  // 2*Omega^2*delta_omega/(pi*g^2). Invariant under length rescaling.
  double transfer_rate() const {
    return 2.0 * cavity_coupling * cavity_coupling * mode_spacing /
           (std::numbers::pi * mode_coupling * mode_coupling);
  }

  // Ring length in units of lambda0 = 2*pi*c/omega0; with delta_omega = 2*pi*c/l
  // this is exactly omega0/mode_spacing.
  double length_over_lambda0() const { return omega0 / mode_spacing; }

  bool operator==(const SystemParams&) const = default;
};

// Checks every structural invariant and returns the params unchanged. Each
// violation throws std::invalid_argument naming the offending field.
inline SystemParams validate_params(const SystemParams& p) {
  if (!(p.omega0 > 0.0))
    throw std::invalid_argument("omega0 must be positive (got " + std::to_string(p.omega0) + ")");
  if (p.n_modes < 2)
    throw std::invalid_argument("n_modes must be at least 2 (got " + std::to_string(p.n_modes) + ")");
  if (p.n_modes % 2 != 0)
    throw std::invalid_argument("n_modes must be even (got " + std::to_string(p.n_modes) + ")");
  if (!(p.mode_coupling > 0.0))
    throw std::invalid_argument("g (mode coupling) must be positive");
  if (!(p.mode_spacing > 0.0))
    throw std::invalid_argument("delta_omega (mode spacing) must be positive");
  if (p.cavity_coupling < 0.0)
    throw std::invalid_argument("omega (cavity coupling) must be non-negative");
  if (!(std::abs(p.perturbation) < 1.0))
    throw std::invalid_argument("epsilon must satisfy |epsilon| < 1 (got " +
                                std::to_string(p.perturbation) + ")");
  return p;
}

// Rescales the comb to a ring of l_ratio times the reference length:
// the mode spacing scales as 1/l and the per-mode coupling as 1/sqrt(l).
// The transfer rate is invariant under this map.
inline SystemParams scale_to_length(const SystemParams& reference, double l_ratio) {
  if (!(l_ratio > 0.0))
    throw std::invalid_argument("length ratio must be positive (got " +
                                std::to_string(l_ratio) + ")");
  SystemParams scaled = reference;
  scaled.mode_spacing = reference.mode_spacing / l_ratio;
  scaled.mode_coupling = reference.mode_coupling / std::sqrt(l_ratio);
  return scaled;
}

// --------------------------------- basis ------------------------------------

// Dense index of resonator mode j, j in [-N/2, N/2].
inline Eigen::Index mode_index(const SystemParams& p, int j) {
  if (j < -p.n_modes / 2 || j > p.n_modes / 2)
    throw std::out_of_range("mode number " + std::to_string(j) + " outside comb");
  return kFirstMode + (j + p.n_modes / 2);
}

// Mode number j of dense index k (k must address a resonator mode).
inline int mode_number(const SystemParams& p, Eigen::Index k) {
  if (k < kFirstMode || k >= p.dimension())
    throw std::out_of_range("index " + std::to_string(k) + " is not a resonator mode");
  return static_cast<int>(k - kFirstMode) - p.n_modes / 2;
}

// ------------------------------ Hamiltonian ---------------------------------

// Single-excitation Hamiltonian. Diagonal: omega0 for both cavities and
// (omega0 + j*delta_omega)*(1 + eps) for mode j, where eps = perturbation when
// `perturbed` is set and 0 otherwise; the cavity frequencies are never
// perturbed. Off-diagonal: cavity_coupling between the two cavities and
// mode_coupling between cavity 2 and every mode. Symmetric by construction.
inline HermitianMatrix assemble_hamiltonian(const SystemParams& p, bool perturbed) {
  const int dim = p.dimension();
  const double eps = perturbed ? p.perturbation : 0.0;
  HermitianMatrix h = HermitianMatrix::Zero(dim, dim);
  h(kCavity1, kCavity1) = p.omega0;
  h(kCavity2, kCavity2) = p.omega0;
  h(kCavity1, kCavity2) = p.cavity_coupling;
  h(kCavity2, kCavity1) = p.cavity_coupling;
  for (int k = 0; k <= p.n_modes; ++k) {
    const int j = k - p.n_modes / 2;
    const Eigen::Index b = kFirstMode + k;
    h(b, b) = (p.omega0 + j * p.mode_spacing) * (1.0 + eps);
    h(kCavity2, b) = p.mode_coupling;
    h(b, kCavity2) = p.mode_coupling;
  }
  return h;
}

// ------------------------------ initial states ------------------------------

enum class InitialState {
  Cavity1,            // all amplitude in cavity 1: the perturbation-stable state
  Cavity2,            // all amplitude in cavity 2, orthogonal to the stable state
  EqualSuperposition  // (|cavity1> + |cavity2>)/sqrt(2)
};

inline StateVector make_initial_state(InitialState kind, Eigen::Index dim) {
  StateVector psi = StateVector::Zero(dim);
  switch (kind) {
    case InitialState::Cavity1:
      psi(kCavity1) = 1.0;
      break;
    case InitialState::Cavity2:
      psi(kCavity2) = 1.0;
      break;
    case InitialState::EqualSuperposition:
      psi(kCavity1) = 1.0 / std::numbers::sqrt2;
      psi(kCavity2) = 1.0 / std::numbers::sqrt2;
      break;
  }
  return psi;
}

// Normalized copy of an arbitrary amplitude vector.
inline StateVector make_initial_state(const StateVector& amplitudes) {
  const double n = amplitudes.norm();
  if (!(n > 0.0))
    throw std::invalid_argument("initial state must have nonzero norm");
  return amplitudes / n;
}

inline std::string to_string(InitialState kind) {
  switch (kind) {
    case InitialState::Cavity1: return "special";
    case InitialState::Cavity2: return "cavity2";
    case InitialState::EqualSuperposition: return "superposition";
  }
  return "?";
}

inline InitialState initial_state_from_string(const std::string& s) {
  if (s == "special" || s == "cavity1") return InitialState::Cavity1;
  if (s == "cavity2") return InitialState::Cavity2;
  if (s == "superposition") return InitialState::EqualSuperposition;
  throw std::invalid_argument("unknown initial state '" + s +
                              "' (expected special|cavity2|superposition)");
}

}  // namespace echosim
