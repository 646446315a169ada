// propagator.hpp — exact unitary evolution via spectral decomposition.
//
// The Hamiltonian is diagonalized once; states at arbitrary times follow from
// psi(t) = V exp(-i Lambda t) V^T psi(0) with no step-size error, so horizons
// of thousands of round trips carry no drift.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include "echosim/model.hpp"

namespace echosim {

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ------------------------------ eigensystem ---------------------------------

struct EigenSystem {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // orthonormal columns, real for symmetric input

  Eigen::Index dimension() const { return eigenvalues.size(); }
};

// Dense symmetric diagonalization. Enforces the residual bound
// max_k ||H v_k - lambda_k v_k|| <= 1e-10 ||H||_F and orthonormality
// ||V^T V - I||_max <= 1e-10; violations throw NumericalError with the worst
// residual. Output is deterministic for identical input.
inline EigenSystem diagonalize(const HermitianMatrix& h) {
  if (h.rows() != h.cols())
    throw std::invalid_argument("diagonalize: matrix must be square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
  if (solver.info() != Eigen::Success)
    throw NumericalError("diagonalize: eigensolver failed to converge");
  EigenSystem eig{solver.eigenvalues(), solver.eigenvectors()};

  const double scale = h.norm();  // Frobenius
  const double worst_residual =
      (h * eig.eigenvectors - eig.eigenvectors * eig.eigenvalues.asDiagonal())
          .colwise()
          .norm()
          .maxCoeff();
  if (worst_residual > 1e-10 * scale)
    throw NumericalError("diagonalize: residual " + std::to_string(worst_residual) +
                         " exceeds 1e-10 * ||H|| = " + std::to_string(1e-10 * scale));
  const double ortho =
      (eig.eigenvectors.transpose() * eig.eigenvectors -
       Eigen::MatrixXd::Identity(h.rows(), h.cols()))
          .cwiseAbs()
          .maxCoeff();
  if (ortho > 1e-10)
    throw NumericalError("diagonalize: eigenvector orthonormality defect " +
                         std::to_string(ortho));
  return eig;
}

// -------------------------------- time grid ---------------------------------

// Uniform sampling grid. Grid values are dimensionless; `time_unit` converts
// them to natural time (experiments set time_unit = T_B so grids read in
// round trips).
struct TimeGrid {
  double t_start = 0.0;
  double dt = 1.0;
  std::size_t count = 1;
  double time_unit = 1.0;

  static TimeGrid from_range(double t_start, double t_end, double dt,
                             double time_unit = 1.0) {
    if (!(dt > 0.0)) throw std::invalid_argument("TimeGrid: dt must be positive");
    if (t_end < t_start) throw std::invalid_argument("TimeGrid: t_end < t_start");
    const auto count = static_cast<std::size_t>(std::llround((t_end - t_start) / dt)) + 1;
    return TimeGrid{t_start, dt, count, time_unit};
  }

  double time(std::size_t k) const { return t_start + static_cast<double>(k) * dt; }
  double natural_time(std::size_t k) const { return time(k) * time_unit; }
  double t_end() const { return time(count - 1); }
  double span() const { return t_end() - t_start; }

  bool operator==(const TimeGrid&) const = default;
};

// -------------------------------- trajectory --------------------------------

struct Trajectory {
  TimeGrid grid;
  Eigen::MatrixXcd states;  // column k = state at grid point k

  Eigen::Index dimension() const { return states.rows(); }
  Eigen::MatrixXcd::ConstColXpr state(std::size_t k) const {
    return states.col(static_cast<Eigen::Index>(k));
  }
};

// psi(t_k) for every grid point. The spectral coefficients V^T psi0 are formed
// once; phases are evaluated exactly per sample (no recurrence, no drift) and
// the basis transform back runs as chunked real matrix products.
inline Trajectory evolve_on_grid(const EigenSystem& eig, const StateVector& psi0,
                                 const TimeGrid& grid) {
  const Eigen::Index dim = eig.dimension();
  if (psi0.size() != dim)
    throw std::invalid_argument("evolve_on_grid: state dimension mismatch");

  const Eigen::VectorXd coeff_re = eig.eigenvectors.transpose() * psi0.real();
  const Eigen::VectorXd coeff_im = eig.eigenvectors.transpose() * psi0.imag();

  Trajectory traj{grid, Eigen::MatrixXcd(dim, static_cast<Eigen::Index>(grid.count))};

  constexpr std::size_t kChunk = 8192;
  Eigen::MatrixXd w_re(dim, static_cast<Eigen::Index>(std::min(kChunk, grid.count)));
  Eigen::MatrixXd w_im(dim, w_re.cols());
  for (std::size_t begin = 0; begin < grid.count; begin += kChunk) {
    const auto len = static_cast<Eigen::Index>(std::min(kChunk, grid.count - begin));
    for (Eigen::Index c = 0; c < len; ++c) {
      const double t = grid.natural_time(begin + static_cast<std::size_t>(c));
      for (Eigen::Index d = 0; d < dim; ++d) {
        const double phase = eig.eigenvalues(d) * t;
        const double cp = std::cos(phase);
        const double sp = std::sin(phase);
        // (c_re + i c_im) * (cos - i sin)
        w_re(d, c) = coeff_re(d) * cp + coeff_im(d) * sp;
        w_im(d, c) = coeff_im(d) * cp - coeff_re(d) * sp;
      }
    }
    const Eigen::MatrixXd out_re = eig.eigenvectors * w_re.leftCols(len);
    const Eigen::MatrixXd out_im = eig.eigenvectors * w_im.leftCols(len);
    for (Eigen::Index c = 0; c < len; ++c)
      for (Eigen::Index d = 0; d < dim; ++d)
        traj.states(d, static_cast<Eigen::Index>(begin) + c) = {out_re(d, c), out_im(d, c)};
  }
  return traj;
}

// Single-time evolution, exact for any t (natural units).
inline StateVector evolve_to(const EigenSystem& eig, const StateVector& psi0, double t) {
  return evolve_on_grid(eig, psi0, TimeGrid{t, 1.0, 1, 1.0}).states.col(0);
}

// Largest |  ||psi_k|| - 1  | over a trajectory; unitarity audit.
inline double max_norm_deviation(const Trajectory& traj) {
  double worst = 0.0;
  for (std::size_t k = 0; k < traj.grid.count; ++k)
    worst = std::max(worst, std::abs(traj.state(k).norm() - 1.0));
  return worst;
}

}  // namespace echosim
