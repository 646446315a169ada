#include <catch2/catch_amalgamated.hpp>

#include <numbers>
#include <random>

#include "echosim/model.hpp"
#include "oracles.hpp"

using namespace echosim;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

TEST_CASE("standard parameters validate and derive the documented scales", "[model]") {
  const SystemParams p = testing::standard_params(0.5);
  REQUIRE_NOTHROW(validate_params(p));
  REQUIRE(p.dimension() == 53);
  REQUIRE(p.round_trip_time() == Approx(1570.7963267948966).epsilon(1e-13));
  // T_B * delta_omega = 2*pi to machine precision
  REQUIRE(p.round_trip_time() * p.mode_spacing ==
          Approx(2.0 * std::numbers::pi).margin(1e-12));
  REQUIRE(p.critical_coupling() == Approx(6e-3 / std::numbers::sqrt2).epsilon(1e-15));
  REQUIRE(p.length_over_lambda0() == Approx(250.0).epsilon(1e-13));
}

TEST_CASE("each invalid field is rejected with a distinct diagnostic", "[model]") {
  SystemParams base = testing::standard_params(0.5);

  SystemParams odd = base;
  odd.n_modes = 51;
  REQUIRE_THROWS_WITH(validate_params(odd), ContainsSubstring("n_modes must be even"));

  SystemParams tiny = base;
  tiny.n_modes = 0;
  REQUIRE_THROWS_WITH(validate_params(tiny), ContainsSubstring("n_modes must be at least 2"));

  SystemParams no_g = base;
  no_g.mode_coupling = 0.0;
  REQUIRE_THROWS_WITH(validate_params(no_g), ContainsSubstring("g (mode coupling)"));

  SystemParams no_spacing = base;
  no_spacing.mode_spacing = 0.0;
  REQUIRE_THROWS_WITH(validate_params(no_spacing), ContainsSubstring("delta_omega"));

  SystemParams no_omega0 = base;
  no_omega0.omega0 = 0.0;
  REQUIRE_THROWS_WITH(validate_params(no_omega0), ContainsSubstring("omega0"));

  SystemParams negative_coupling = base;
  negative_coupling.cavity_coupling = -1e-3;
  REQUIRE_THROWS_WITH(validate_params(negative_coupling),
                      ContainsSubstring("omega (cavity coupling)"));

  SystemParams big_eps = base;
  big_eps.perturbation = 1.0;
  REQUIRE_THROWS_WITH(validate_params(big_eps), ContainsSubstring("epsilon"));
}

TEST_CASE("transfer rate formula and its invariances", "[model]") {
  // Omega = g/(2*sqrt(2)) makes gamma * T_B = 4*(Omega/g)^2 = 1/2 exactly.
  SystemParams p = testing::standard_params(0.5);
  REQUIRE(p.cavity_coupling == Approx(p.mode_coupling / (2.0 * std::numbers::sqrt2)));
  REQUIRE(p.transfer_rate() * p.round_trip_time() == Approx(0.5).margin(1e-12));

  SystemParams off = p;
  off.cavity_coupling = 0.0;
  REQUIRE(off.transfer_rate() == 0.0);

  // Doubling the length (spacing/2, coupling/sqrt2) leaves gamma unchanged.
  SystemParams doubled = p;
  doubled.mode_spacing /= 2.0;
  doubled.mode_coupling /= std::numbers::sqrt2;
  REQUIRE(doubled.transfer_rate() == Approx(p.transfer_rate()).epsilon(1e-13));
}

TEST_CASE("length rescaling map", "[model]") {
  const SystemParams reference = testing::standard_params(0.5);

  const SystemParams shrunk = scale_to_length(reference, 10.0 / 250.0);
  REQUIRE(shrunk.mode_spacing == Approx(1e-1).epsilon(1e-13));
  REQUIRE(shrunk.mode_coupling == Approx(3e-2).epsilon(1e-13));
  REQUIRE(shrunk.length_over_lambda0() == Approx(10.0).epsilon(1e-13));

  REQUIRE(scale_to_length(reference, 1.0) == reference);

  REQUIRE_THROWS_AS(scale_to_length(reference, 0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(scale_to_length(reference, -2.0), std::invalid_argument);

  // gamma invariance under arbitrary rescaling
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ratio_dist(0.01, 50.0);
  for (int i = 0; i < 50; ++i) {
    const double r = ratio_dist(rng);
    const SystemParams scaled = scale_to_length(reference, r);
    REQUIRE(scaled.transfer_rate() == Approx(reference.transfer_rate()).epsilon(1e-12));
    REQUIRE(scaled.length_over_lambda0() ==
            Approx(reference.length_over_lambda0() * r).epsilon(1e-12));
  }
}

TEST_CASE("basis index map is a bijection over the comb", "[model]") {
  const SystemParams p = testing::standard_params(0.5);
  REQUIRE(mode_index(p, -p.n_modes / 2) == kFirstMode);
  REQUIRE(mode_index(p, p.n_modes / 2) == p.dimension() - 1);
  for (Eigen::Index k = kFirstMode; k < p.dimension(); ++k)
    REQUIRE(mode_index(p, mode_number(p, k)) == k);
  REQUIRE_THROWS_AS(mode_index(p, p.n_modes / 2 + 1), std::out_of_range);
  REQUIRE_THROWS_AS(mode_number(p, kCavity1), std::out_of_range);
  REQUIRE_THROWS_AS(mode_number(p, p.dimension()), std::out_of_range);
}

TEST_CASE("hamiltonian has the documented structure", "[model]") {
  const SystemParams p = testing::standard_params(10.0);
  const HermitianMatrix h = assemble_hamiltonian(p, false);

  REQUIRE(h.rows() == 53);
  REQUIRE(h.cols() == 53);
  // exact symmetry by construction
  REQUIRE((h - h.transpose()).cwiseAbs().maxCoeff() == 0.0);

  REQUIRE(h(kCavity1, kCavity1) == p.omega0);
  REQUIRE(h(kCavity2, kCavity2) == p.omega0);
  REQUIRE(h(kCavity1, kCavity2) == p.cavity_coupling);
  for (int j = -25; j <= 25; ++j)
    REQUIRE(h(kCavity2, mode_index(p, j)) == p.mode_coupling);

  // sparsity: cavity 1 touches only itself and cavity 2; each mode touches
  // only itself and cavity 2
  for (Eigen::Index col = kFirstMode; col < p.dimension(); ++col)
    REQUIRE(h(kCavity1, col) == 0.0);
  for (Eigen::Index row = kFirstMode; row < p.dimension(); ++row)
    for (Eigen::Index col = kFirstMode; col < p.dimension(); ++col)
      if (row != col) REQUIRE(h(row, col) == 0.0);

  // mode frequencies strictly increasing in j
  for (Eigen::Index k = kFirstMode + 1; k < p.dimension(); ++k)
    REQUIRE(h(k, k) > h(k - 1, k - 1));
}

TEST_CASE("perturbation flag shifts only the comb", "[model]") {
  const SystemParams p = testing::standard_params(0.5);
  const HermitianMatrix h0 = assemble_hamiltonian(p, false);
  const HermitianMatrix h1 = assemble_hamiltonian(p, true);

  const Eigen::Index center = mode_index(p, 0);
  REQUIRE(h0(center, center) == p.omega0);
  REQUIRE(h1(center, center) == Approx(p.omega0 * (1.0 + 1e-5)).epsilon(1e-15));
  REQUIRE(h1(kCavity1, kCavity1) == p.omega0);
  REQUIRE(h1(kCavity2, kCavity2) == p.omega0);
  for (int j = -25; j <= 25; ++j) {
    const Eigen::Index b = mode_index(p, j);
    REQUIRE(h0(b, b) == Approx(p.omega0 + j * p.mode_spacing).epsilon(1e-15));
    REQUIRE(h1(b, b) ==
            Approx((p.omega0 + j * p.mode_spacing) * (1.0 + p.perturbation)).epsilon(1e-15));
  }
}

TEST_CASE("decoupled cavity 1 when the cavity coupling vanishes", "[model]") {
  SystemParams p = testing::standard_params(0.0);
  const HermitianMatrix h = assemble_hamiltonian(p, false);
  for (Eigen::Index col = 0; col < p.dimension(); ++col)
    if (col != kCavity1) REQUIRE(h(kCavity1, col) == 0.0);
  REQUIRE(h(kCavity1, kCavity1) == p.omega0);
}

TEST_CASE("initial state presets", "[model]") {
  const int dim = 53;
  const StateVector special = make_initial_state(InitialState::Cavity1, dim);
  REQUIRE(std::norm(special(kCavity1)) == Approx(1.0).margin(1e-15));
  REQUIRE(special.norm() == Approx(1.0).margin(1e-15));

  const StateVector cavity2 = make_initial_state(InitialState::Cavity2, dim);
  REQUIRE(std::norm(cavity2(kCavity2)) == Approx(1.0).margin(1e-15));

  const StateVector super = make_initial_state(InitialState::EqualSuperposition, dim);
  REQUIRE(super.norm() == Approx(1.0).margin(1e-12));
  REQUIRE(std::norm(special.dot(super)) == Approx(0.5).margin(1e-12));
}

TEST_CASE("custom initial states are normalized, zero norm rejected", "[model]") {
  StateVector raw = StateVector::Zero(5);
  raw(0) = {3.0, 0.0};
  raw(3) = {0.0, 4.0};
  const StateVector normalized = make_initial_state(raw);
  REQUIRE(normalized.norm() == Approx(1.0).margin(1e-15));
  REQUIRE(std::abs(normalized(0)) == Approx(0.6).margin(1e-15));

  REQUIRE_THROWS_AS(make_initial_state(StateVector::Zero(5)), std::invalid_argument);
}

TEST_CASE("initial state names round-trip", "[model]") {
  for (auto kind : {InitialState::Cavity1, InitialState::Cavity2,
                    InitialState::EqualSuperposition})
    REQUIRE(initial_state_from_string(to_string(kind)) == kind);
  REQUIRE(initial_state_from_string("cavity1") == InitialState::Cavity1);
  REQUIRE_THROWS_AS(initial_state_from_string("ground"), std::invalid_argument);
}
