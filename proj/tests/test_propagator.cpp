#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "echosim/model.hpp"
#include "echosim/propagator.hpp"
#include "oracles.hpp"

using namespace echosim;
using Catch::Approx;

namespace {

// <psi|H|psi> for real symmetric H: x^T H x + y^T H y.
double energy_expectation(const HermitianMatrix& h, const Eigen::Ref<const StateVector>& psi) {
  const Eigen::VectorXd x = psi.real();
  const Eigen::VectorXd y = psi.imag();
  return x.dot(h * x) + y.dot(h * y);
}

}  // namespace

TEST_CASE("already-diagonal matrix reproduces its diagonal", "[propagator]") {
  SystemParams p = testing::standard_params(0.0);
  p.mode_coupling = 0.0;  // bypasses validation on purpose: assembly is mechanical
  const HermitianMatrix h = assemble_hamiltonian(p, false);
  const EigenSystem eig = diagonalize(h);

  std::vector<double> diag(static_cast<std::size_t>(h.rows()));
  for (Eigen::Index i = 0; i < h.rows(); ++i) diag[static_cast<std::size_t>(i)] = h(i, i);
  std::sort(diag.begin(), diag.end());
  for (Eigen::Index i = 0; i < h.rows(); ++i)
    REQUIRE(eig.eigenvalues(i) == Approx(diag[static_cast<std::size_t>(i)]).margin(1e-14));
}

TEST_CASE("cavity block splits into omega0 +- Omega when g = 0", "[propagator]") {
  SystemParams p = testing::standard_params(0.0);
  p.cavity_coupling = 2.5e-3;
  p.mode_coupling = 0.0;
  const EigenSystem eig = diagonalize(assemble_hamiltonian(p, false));
  const auto closest = [&](double target) {
    double best = 1e300;
    for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i)
      best = std::min(best, std::abs(eig.eigenvalues(i) - target));
    return best;
  };
  REQUIRE(closest(p.omega0 + p.cavity_coupling) < 1e-12);
  REQUIRE(closest(p.omega0 - p.cavity_coupling) < 1e-12);
}

TEST_CASE("eigensystem invariants at the standard parameters", "[propagator]") {
  const SystemParams p = testing::standard_params(0.5);
  const HermitianMatrix h = assemble_hamiltonian(p, false);
  const EigenSystem eig = diagonalize(h);

  for (Eigen::Index i = 1; i < eig.eigenvalues.size(); ++i)
    REQUIRE(eig.eigenvalues(i) >= eig.eigenvalues(i - 1));

  const double worst_residual =
      (h * eig.eigenvectors - eig.eigenvectors * eig.eigenvalues.asDiagonal())
          .colwise().norm().maxCoeff();
  REQUIRE(worst_residual <= 1e-10 * h.norm());

  const double ortho = (eig.eigenvectors.transpose() * eig.eigenvectors -
                        Eigen::MatrixXd::Identity(h.rows(), h.cols()))
                           .cwiseAbs().maxCoeff();
  REQUIRE(ortho <= 1e-10);

  // deterministic for identical input
  const EigenSystem again = diagonalize(h);
  REQUIRE((again.eigenvalues - eig.eigenvalues).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE((again.eigenvectors - eig.eigenvectors).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("diagonalize rejects non-square input", "[propagator]") {
  REQUIRE_THROWS_AS(diagonalize(Eigen::MatrixXd::Zero(3, 4)), std::invalid_argument);
}

TEST_CASE("evolution at t = 0 is the identity", "[propagator]") {
  const SystemParams p = testing::small_params();
  const EigenSystem eig = diagonalize(assemble_hamiltonian(p, false));
  const StateVector psi0 = make_initial_state(InitialState::EqualSuperposition, p.dimension());
  REQUIRE((evolve_to(eig, psi0, 0.0) - psi0).norm() < 1e-14);
}

TEST_CASE("two-level Rabi oscillation when the comb is detached", "[propagator]") {
  SystemParams p = testing::standard_params(0.0);
  p.cavity_coupling = 1e-3;
  p.mode_coupling = 0.0;
  const EigenSystem eig = diagonalize(assemble_hamiltonian(p, false));
  const StateVector psi0 = make_initial_state(InitialState::Cavity1, p.dimension());
  for (double t : {0.0, 137.0, 1570.0, 9424.5, 15707.9}) {
    const StateVector psi = evolve_to(eig, psi0, t);
    const double expected = std::pow(std::cos(p.cavity_coupling * t), 2);
    REQUIRE(std::norm(psi(kCavity1)) == Approx(expected).margin(1e-12));
  }
}

TEST_CASE("decoupled cavity 1 only picks up a phase", "[propagator]") {
  const SystemParams p = testing::standard_params(0.0);
  const EigenSystem eig = diagonalize(assemble_hamiltonian(p, false));
  const StateVector psi0 = make_initial_state(InitialState::Cavity1, p.dimension());
  const double t = 4567.8;
  const StateVector psi = evolve_to(eig, psi0, t);
  const std::complex<double> expected = std::exp(std::complex<double>(0.0, -p.omega0 * t));
  REQUIRE(std::abs(psi(kCavity1) - expected) < 1e-10);
  REQUIRE(std::norm(psi(kCavity1)) == Approx(1.0).margin(1e-12));
}

TEST_CASE("single-point grid returns the initial state", "[propagator]") {
  const SystemParams p = testing::small_params();
  const EigenSystem eig = diagonalize(assemble_hamiltonian(p, false));
  const StateVector psi0 = make_initial_state(InitialState::Cavity2, p.dimension());
  const Trajectory traj = evolve_on_grid(eig, psi0, TimeGrid{0.0, 1.0, 1, 1.0});
  REQUIRE(traj.grid.count == 1);
  REQUIRE((traj.state(0) - psi0).norm() < 1e-14);
}

TEST_CASE("grid evolution matches single-time evolution and keeps norm", "[propagator]") {
  const SystemParams p = testing::standard_params(0.5);
  const EigenSystem eig = diagonalize(assemble_hamiltonian(p, false));
  const StateVector psi0 = make_initial_state(InitialState::Cavity1, p.dimension());
  const TimeGrid grid = TimeGrid::from_range(0.0, 100.0, 0.05, p.round_trip_time());
  const Trajectory traj = evolve_on_grid(eig, psi0, grid);

  REQUIRE(max_norm_deviation(traj) <= 1e-10);
  for (std::size_t k : {std::size_t{1}, std::size_t{777}, grid.count - 1}) {
    const StateVector direct = evolve_to(eig, psi0, grid.natural_time(k));
    REQUIRE((traj.state(k) - direct).norm() < 1e-12);
  }
}

TEST_CASE("semigroup property", "[propagator]") {
  const SystemParams p = testing::standard_params(0.5);
  const EigenSystem eig = diagonalize(assemble_hamiltonian(p, false));
  const StateVector psi0 = make_initial_state(InitialState::EqualSuperposition, p.dimension());
  const double t1 = 333.7 * p.round_trip_time();
  const double t2 = 666.3 * p.round_trip_time();
  const StateVector hop = evolve_to(eig, evolve_to(eig, psi0, t1), t2);
  const StateVector direct = evolve_to(eig, psi0, t1 + t2);
  REQUIRE((hop - direct).norm() < 1e-10);
}

TEST_CASE("evolution is reversible through conjugation", "[propagator]") {
  const SystemParams p = testing::standard_params(0.5);
  const EigenSystem eig = diagonalize(assemble_hamiltonian(p, false));
  const StateVector psi0 = make_initial_state(InitialState::Cavity1, p.dimension());
  const double t = 1000.0 * p.round_trip_time();
  const StateVector forward = evolve_to(eig, psi0, t);
  const StateVector back = evolve_to(eig, forward.conjugate(), t);
  REQUIRE((back - psi0.conjugate()).norm() < 1e-8);
}

TEST_CASE("energy expectation is conserved along a trajectory", "[propagator]") {
  const SystemParams p = testing::standard_params(0.5);
  const HermitianMatrix h = assemble_hamiltonian(p, false);
  const EigenSystem eig = diagonalize(h);
  const StateVector psi0 = make_initial_state(InitialState::EqualSuperposition, p.dimension());
  const Trajectory traj =
      evolve_on_grid(eig, psi0, TimeGrid::from_range(0.0, 50.0, 0.1, p.round_trip_time()));
  const double e0 = energy_expectation(h, traj.state(0));
  for (std::size_t k = 0; k < traj.grid.count; ++k)
    REQUIRE(energy_expectation(h, traj.state(k)) == Approx(e0).margin(1e-10));
}

TEST_CASE("spectral propagation agrees with an independent RK4 integration",
          "[propagator][oracle]") {
  const SystemParams p = testing::small_params();
  const HermitianMatrix h = assemble_hamiltonian(p, false);
  const EigenSystem eig = diagonalize(h);
  const Eigen::MatrixXcd hc = h.cast<std::complex<double>>();
  const StateVector psi0 = make_initial_state(InitialState::Cavity1, p.dimension());

  // four checkpoints out to 10 round trips
  const double segment = 2.5 * p.round_trip_time();
  StateVector rk4 = psi0;
  for (int leg = 1; leg <= 4; ++leg) {
    rk4 = testing::rk4_evolve(hc, rk4, segment, 60000);
    const StateVector spectral = evolve_to(eig, psi0, leg * segment);
    REQUIRE((spectral - rk4).norm() < 1e-8);
  }
}

TEST_CASE("dimension mismatches are rejected", "[propagator]") {
  const SystemParams p = testing::small_params();
  const EigenSystem eig = diagonalize(assemble_hamiltonian(p, false));
  REQUIRE_THROWS_AS(evolve_to(eig, StateVector::Zero(p.dimension() + 1), 1.0),
                    std::invalid_argument);
}

TEST_CASE("time grids validate their construction", "[propagator]") {
  REQUIRE_THROWS_AS(TimeGrid::from_range(0.0, 10.0, 0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(TimeGrid::from_range(5.0, 1.0, 0.1), std::invalid_argument);
  const TimeGrid grid = TimeGrid::from_range(0.0, 400.0, 0.01);
  REQUIRE(grid.count == 40001);
  REQUIRE(grid.t_end() == Approx(400.0).margin(1e-9));
}
