#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "spinres/constants.hpp"
#include "spinres/errors.hpp"
#include "spinres/memory.hpp"

using namespace spinres;
using std::complex;
namespace k = spinres::constants;

namespace {

MemoryParams uniform_params(std::size_t n, double g_total, double kappa = 0.0,
                            double gamma2 = 0.0) {
  // n identical resonant spins whose quadrature sum is g_total.
  MemoryParams p;
  p.spins.assign(n, SpinMember{g_total / std::sqrt(static_cast<double>(n)), 0.0});
  p.kappa = kappa;
  p.gamma2 = gamma2;
  return p;
}

MemoryState conjugated(const MemoryState& st) {
  MemoryState out = st;
  out.a = std::conj(out.a);
  out.s = out.s.conjugate();
  return out;
}

}  // namespace

TEST_CASE("macro-spin reduction preserves the collective coupling exactly") {
  // Representing N spins by n macro-spins must keep g_ens: the cavity only
  // sees the quadrature sum of the couplings.
  const auto uniform = SpinEnsemble::uniform(1e8, 2.0 * k::pi * 100.0);
  for (std::size_t n : {1, 4, 50}) {
    const auto p = MemoryParams::from_ensemble(uniform, n);
    REQUIRE(p.spins.size() == n);
    CHECK(p.g_ens() == doctest::Approx(ensemble_coupling(uniform)).epsilon(1e-12));
  }

  // A member list standing in for a larger population scales the same way.
  const auto listed = SpinEnsemble::from_members({{3.0, 0.1}, {4.0, -0.2}}, 2e4);
  const auto p = MemoryParams::from_ensemble(listed, 2);
  CHECK(p.g_ens() == doctest::Approx(ensemble_coupling(listed)).epsilon(1e-12));
  CHECK(p.spins[0].g / p.spins[1].g == doctest::Approx(3.0 / 4.0).epsilon(1e-12));
  CHECK(p.spins[0].delta == 0.1);  // detunings are not rescaled
}

TEST_CASE("decoupled cavity picks up only its detuning phase") {
  MemoryParams p;
  p.spins = {SpinMember{0.0, 1.7}};
  p.delta_c = 3.0;

  auto st = MemoryState::photon_in_cavity(1, {0.6, 0.8});
  st.s[0] = complex<double>(0.3, -0.1);
  const auto initial_spin = st.s[0];

  const double t = 2.5;
  const auto out = evolve(st, p, t);
  // Tolerances sized to the default-step truncation error of the integrator.
  const auto expected = complex<double>(0.6, 0.8) * std::exp(complex<double>(0.0, -3.0 * t));
  CHECK(std::abs(out.a - expected) < 5e-9);
  // The spin is detuned but uncoupled: it only rotates too.
  CHECK(std::abs(out.s[0] - initial_spin * std::exp(complex<double>(0.0, -1.7 * t))) < 5e-9);
  CHECK(out.time == doctest::Approx(t));
}

TEST_CASE("single resonant spin Rabi-oscillates with the cavity") {
  const double g = 1.0;
  MemoryParams p;
  p.spins = {SpinMember{g, 0.0}};
  const auto st = MemoryState::photon_in_cavity(1);

  // Full transfer at t = pi/2g, full return at t = pi/g.
  const auto half = evolve(st, p, 0.5 * k::pi / g);
  CHECK(std::norm(half.s[0]) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::norm(half.a) < 1e-9);

  const auto full = evolve(st, p, k::pi / g);
  CHECK(std::norm(full.a) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(full.a - complex<double>(-1.0, 0.0)) < 1e-6);

  // Against the cosine law on a time grid.
  for (double t : {0.2, 0.7, 1.3, 2.9}) {
    const auto mid = evolve(st, p, t);
    CHECK(std::abs(mid.a - complex<double>(std::cos(g * t), 0.0)) < 1e-8);
    CHECK(std::abs(mid.s[0] - complex<double>(0.0, -std::sin(g * t))) < 1e-8);
  }
}

TEST_CASE("three-spin dynamics match the matrix-exponential oracle to 1e-9") {
  const std::vector<double> g = {0.8, 1.3, 0.45};
  const std::vector<double> delta = {-0.9, 0.3, 1.1};
  MemoryParams p;
  for (std::size_t j = 0; j < g.size(); ++j) p.spins.push_back({g[j], delta[j]});
  p.delta_c = 0.4;
  p.kappa = 0.35;
  p.gamma2 = 0.12;

  MemoryState st;
  st.a = complex<double>(0.7, -0.2);
  st.s.resize(3);
  st.s << complex<double>(0.1, 0.4), complex<double>(-0.3, 0.0), complex<double>(0.2, 0.2);

  Eigen::VectorXcd y0(4);
  y0 << st.a, st.s[0], st.s[1], st.s[2];

  for (double t : {0.5, 2.0, 7.0}) {
    const auto out = evolve(st, p, t);
    const auto ref = oracle::propagate_exponential(y0, g, delta, p.delta_c, p.kappa, p.gamma2, t);
    CHECK(std::abs(out.a - ref[0]) < 1e-9);
    for (int j = 0; j < 3; ++j) CHECK(std::abs(out.s[j] - ref[j + 1]) < 1e-9);
  }
}

TEST_CASE("halving the step shrinks the error at 4th order") {
  const std::vector<double> g = {1.0, 0.6};
  const std::vector<double> delta = {0.5, -0.8};
  MemoryParams p;
  p.spins = {SpinMember{g[0], delta[0]}, SpinMember{g[1], delta[1]}};
  p.kappa = 0.2;

  MemoryState st = MemoryState::photon_in_cavity(2);
  Eigen::VectorXcd y0(3);
  y0 << st.a, st.s[0], st.s[1];
  const double t = 3.0;
  const auto ref = oracle::propagate_exponential(y0, g, delta, 0.0, p.kappa, 0.0, t);

  auto err = [&](double dt) {
    const auto out = evolve(st, p, t, dt);
    double e = std::abs(out.a - ref[0]);
    for (int j = 0; j < 2; ++j) e = std::max(e, std::abs(out.s[j] - ref[j + 1]));
    return e;
  };

  // Steps coarse enough that truncation dominates rounding.
  const double e1 = err(0.05);
  const double e2 = err(0.025);
  const double e3 = err(0.0125);
  CHECK(e1 / e2 >= 8.0);
  CHECK(e2 / e3 >= 8.0);
}

TEST_CASE("lossless evolution conserves the norm to 1e-9 over ten thousand steps") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MemoryParams p;
  for (int j = 0; j < 5; ++j) p.spins.push_back({std::abs(u(rng)) + 0.1, u(rng)});
  p.delta_c = 0.3;

  MemoryState st = MemoryState::photon_in_cavity(5, {0.8, 0.1});
  for (int j = 0; j < 5; ++j) st.s[j] = complex<double>(0.2 * u(rng), 0.2 * u(rng));
  const double norm0 = st.norm_sq();

  double max_rate = std::max(p.g_ens(), std::abs(p.delta_c));
  for (const auto& m : p.spins) max_rate = std::max(max_rate, std::abs(m.delta));
  const double dt = 0.005 / max_rate;
  const auto out = evolve(st, p, 1e4 * dt, dt);
  CHECK(std::abs(out.norm_sq() - norm0) / norm0 < 1e-9);
}

TEST_CASE("modes orthogonal to the bright mode never touch the cavity") {
  // Equal detunings keep the dark manifold closed even with cavity loss.
  const std::size_t n = 4;
  auto p = uniform_params(n, 2.0, 0.6);
  for (auto& m : p.spins) m.delta = 0.7;

  MemoryState st = MemoryState::photon_in_cavity(n, 0.0);
  st.s.setZero();
  st.s[0] = 1.0 / std::sqrt(2.0);
  st.s[1] = -1.0 / std::sqrt(2.0);

  const auto u = bright_mode(p);
  CHECK(std::abs(u.overlap(st)) < 1e-15);

  const double norm0 = st.norm_sq();
  MemoryState cur = st;
  for (int leg = 0; leg < 5; ++leg) {
    cur = evolve(cur, p, 1.3);
    CHECK(std::abs(u.overlap(cur)) < 1e-9);
    CHECK(std::abs(cur.a) < 1e-9);
    // kappa only drains the cavity; a dark state keeps its norm.
    CHECK(std::abs(cur.norm_sq() - norm0) < 1e-8);
  }
}

TEST_CASE("conjugation reverses lossless evolution to 1e-8") {
  MemoryParams p;
  p.spins = {SpinMember{0.9, 0.4}, SpinMember{1.2, -0.6}, SpinMember{0.3, 1.5}};

  MemoryState st = MemoryState::photon_in_cavity(3, {0.5, 0.5});
  st.s << complex<double>(0.1, -0.2), complex<double>(0.0, 0.3), complex<double>(-0.4, 0.0);

  const double t = 4.0;
  const auto forward = evolve(st, p, t);
  auto back = evolve(conjugated(forward), p, t);
  back = conjugated(back);

  CHECK(std::abs(back.a - st.a) < 1e-8);
  for (int j = 0; j < 3; ++j) CHECK(std::abs(back.s[j] - st.s[j]) < 1e-8);
}

TEST_CASE("swap finds pi/(2 g_ens) and lands in the bright mode") {
  const double g_ens = 2.0 * k::pi * 1e5;
  const auto p = uniform_params(50, g_ens);
  const auto st = MemoryState::photon_in_cavity(50);

  const auto res = swap(st, p);
  CHECK(res.t_swap == doctest::Approx(0.5 * k::pi / g_ens).epsilon(0.01));
  CHECK(res.residual_fraction < 0.01);
  CHECK(std::norm(res.state.a) < 0.01);

  const auto u = bright_mode(p);
  CHECK(std::norm(u.overlap(res.state)) > 0.999);

  // N = 1 reduces to the bare Rabi case.
  const auto single = swap(MemoryState::photon_in_cavity(1), uniform_params(1, g_ens));
  CHECK(single.t_swap == doctest::Approx(0.5 * k::pi / g_ens).epsilon(0.01));
}

TEST_CASE("swap refuses hopeless transfers") {
  // Far-detuned spins never deplete the cavity.
  MemoryParams p;
  p.spins.assign(4, SpinMember{0.5, 0.0});
  for (auto& m : p.spins) m.delta = 60.0;
  CHECK_THROWS_AS((void)swap(MemoryState::photon_in_cavity(4), p), NoTransferError);

  // Nothing couples at all.
  MemoryParams idle;
  idle.spins.assign(2, SpinMember{0.0, 0.0});
  CHECK_THROWS_AS((void)swap(MemoryState::photon_in_cavity(2), idle), NoTransferError);

  // Empty cavity has nothing to swap.
  CHECK_THROWS_AS((void)swap(MemoryState::photon_in_cavity(3, 0.0), uniform_params(3, 1.0)),
                  InvalidInputError);
}

TEST_CASE("stored fraction after the swap decreases as the cavity gets lossier") {
  const double g_ens = 1.0;
  double prev = 1.1;
  for (double kappa : {0.0, g_ens / 100.0, g_ens / 50.0, g_ens / 25.0, g_ens / 10.0}) {
    const auto p = uniform_params(10, g_ens, kappa);
    const auto res = swap(MemoryState::photon_in_cavity(10), p);
    const double stored = res.state.s.squaredNorm();
    CHECK(stored < prev);
    CHECK(stored <= 1.0);
    prev = stored;
  }
}

TEST_CASE("gradient phases dephase and rephase exactly") {
  const std::size_t n = 16;
  const auto p = uniform_params(n, 1.0);
  auto res = swap(MemoryState::photon_in_cavity(n), p);

  const auto u = bright_mode(p);
  CHECK(std::norm(u.overlap(res.state)) > 0.999);

  // Zero phases are the identity.
  const auto same = apply_gradient(res.state, std::vector<double>(n, 0.0));
  CHECK((same.s - res.state.s).norm() == 0.0);

  // One ladder step empties the bright mode for identical couplings.
  const auto phases = mode_phases(n, 1);
  const auto shifted = apply_gradient(res.state, phases);
  CHECK(std::norm(u.overlap(shifted)) < 1e-20);
  CHECK(shifted.norm_sq() == doctest::Approx(res.state.norm_sq()).epsilon(1e-14));

  // Applying the negated phases restores the state exactly.
  auto neg = phases;
  for (auto& ph : neg) ph = -ph;
  const auto restored = apply_gradient(shifted, neg);
  CHECK((restored.s - res.state.s).norm() < 1e-15);
}

TEST_CASE("retrieval through the cavity port collects nearly all stored energy") {
  const double g_ens = 1.0;
  const std::size_t n = 20;
  const auto kappa = g_ens / 5.0;
  const auto p = uniform_params(n, g_ens, kappa);

  // Store with the lossless swap, then retrieve through the port.
  const auto stored = swap(MemoryState::photon_in_cavity(n), uniform_params(n, g_ens));
  const auto phases = mode_phases(n, 2);
  const auto parked = apply_gradient(stored.state, phases);

  const auto res = retrieve(parked, p, phases);
  CHECK(res.efficiency > 0.99);
  CHECK(res.efficiency <= 1.0);
  REQUIRE(!res.trace.empty());
  CHECK(res.trace.front().stored_norm_sq > 0.9);
  CHECK(res.trace.back().stored_norm_sq < 0.01);

  // Fast homogeneous decay kills the excitation before it can leave.
  auto dead = uniform_params(n, g_ens, kappa, 50.0 * g_ens);
  const auto lost = retrieve(parked, dead, phases, 10.0 / g_ens);
  CHECK(lost.efficiency < 0.05);

  // An empty state retrieves nothing.
  const auto none = retrieve(MemoryState::photon_in_cavity(n, 0.0), p);
  CHECK(none.efficiency == 0.0);
}

TEST_CASE("two qubits ride the mode ladder with tiny crosstalk") {
  const std::size_t n = 100;
  const auto p = uniform_params(n, 2.0 * k::pi * 1e5);

  Eigen::VectorXcd inputs(2);
  inputs << complex<double>(0.9, 0.1), complex<double>(-0.3, 0.7);
  const auto report = multimode_store_retrieve(inputs, p);

  REQUIRE(report.fidelities.size() == 2);
  CHECK(report.fidelities[0] > 0.98);
  CHECK(report.fidelities[1] > 0.98);
  CHECK(report.max_crosstalk < 0.02);

  // Each qubit crosses the cavity-spin interface twice, so a resonant
  // round trip returns minus the input ((-i)^2 from the two half-Rabi swaps).
  CHECK(std::abs(report.retrieved[0] + inputs[0]) < 0.05);
  CHECK(std::abs(report.retrieved[1] + inputs[1]) < 0.05);
  CHECK(std::abs(report.transfer(0, 0) + 1.0) < 0.03);
}

TEST_CASE("single-input multimode reduces to one swap in and out") {
  const auto p = uniform_params(25, 1.0);
  Eigen::VectorXcd one(1);
  one << complex<double>(1.0, 0.0);
  const auto report = multimode_store_retrieve(one, p);
  CHECK(report.fidelities[0] > 0.999);
  CHECK(report.max_crosstalk == 0.0);
}

TEST_CASE("mean fidelity does not improve as more qubits are loaded") {
  // Uneven couplings make the ladder modes leak into each other.
  const std::size_t n = 40;
  MemoryParams p;
  for (std::size_t j = 0; j < n; ++j)
    p.spins.push_back({1.0 + 0.2 * std::sin(2.3 * static_cast<double>(j)), 0.0});
  p.kappa = p.g_ens() / 200.0;

  double prev = 2.0;
  for (int m = 1; m <= 4; ++m) {
    const Eigen::VectorXcd inputs = Eigen::VectorXcd::Ones(m);
    const auto report = multimode_store_retrieve(inputs, p);
    double mean = 0.0;
    for (double f : report.fidelities) mean += f;
    mean /= static_cast<double>(m);
    CHECK(mean <= prev + 1e-6);
    CHECK(mean > 0.5);
    prev = mean;
  }
}

TEST_CASE("overfilling the ladder is rejected") {
  const auto p = uniform_params(5, 1.0);
  Eigen::VectorXcd inputs = Eigen::VectorXcd::Ones(6);
  CHECK_THROWS_AS((void)multimode_store_retrieve(inputs, p), CapacityError);
  Eigen::VectorXcd empty(0);
  CHECK_THROWS_AS((void)multimode_store_retrieve(empty, p), InvalidInputError);
}

TEST_CASE("echo emission matches N^2 C0 order of magnitude") {
  // Analytic branch alone: N = 100 at C0 = 1e-3 emits 10 photons.
  const double gamma2_star = 1e6;
  const double kappa = 10.0 * gamma2_star;
  const double g0 = std::sqrt(1e-3 * kappa * gamma2_star / 4.0);
  const auto r = echo_photon_count(g0, kappa, gamma2_star, 100.0);
  CHECK(r.analytic_photons == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(r.cooperativity == doctest::Approx(1e-3).epsilon(1e-12));

  // Simulation against the analytic estimate on a coarse grid. N C0 stays
  // at or below 0.1 so the emission is a small perturbation on the stored
  // energy (the weak-coupling regime the analytic count assumes).
  for (double c0 : {1e-4, 3e-4, 1e-3}) {
    for (double ratio : {0.02, 0.06, 0.2}) {
      const double kap = gamma2_star / ratio;
      const double g = std::sqrt(c0 * kap * gamma2_star / 4.0);
      const auto rep = echo_photon_count(g, kap, gamma2_star, 100.0);
      const double q = rep.simulated_photons / rep.analytic_photons;
      CHECK(q > 1.0 / 3.0);
      CHECK(q < 3.0);
    }
  }

  // No coupling, no photons.
  const auto silent = echo_photon_count(0.0, kappa, gamma2_star, 100.0);
  CHECK(silent.simulated_photons == 0.0);
  CHECK(silent.analytic_photons == 0.0);
}

TEST_CASE("diverging integrations are reported, not returned") {
  MemoryParams p;
  p.spins = {SpinMember{1.0, 0.0}};
  const auto st = MemoryState::photon_in_cavity(1);
  // A step this large amplifies the amplitudes past the finite range.
  CHECK_THROWS_AS((void)evolve(st, p, 1e7, 1e3), NumericalInstabilityError);
}

TEST_CASE("memory input validation") {
  MemoryParams p;
  p.spins = {SpinMember{1.0, 0.0}};

  auto st = MemoryState::photon_in_cavity(2);
  CHECK_THROWS_AS((void)evolve(st, p, 1.0), InvalidInputError);

  st = MemoryState::photon_in_cavity(1);
  CHECK_THROWS_AS((void)evolve(st, p, -1.0), InvalidInputError);

  p.kappa = -0.1;
  CHECK_THROWS_AS((void)evolve(st, p, 1.0), InvalidInputError);
  p.kappa = 0.0;

  CHECK_THROWS_AS((void)apply_gradient(st, {0.1, 0.2}), InvalidInputError);
  CHECK_THROWS_AS((void)mode_phases(0, 1), InvalidInputError);

  MemoryParams empty;
  CHECK_THROWS_AS((void)evolve(st, empty, 1.0), InvalidInputError);

  CHECK_THROWS_AS((void)echo_photon_count(1.0, 0.0, 1.0, 10.0), InvalidInputError);
  CHECK_THROWS_AS((void)echo_photon_count(1.0, 1.0, -1.0, 10.0), InvalidInputError);
  CHECK_THROWS_AS((void)echo_photon_count(1.0, 1.0, 1.0, 0.0), InvalidInputError);
}
