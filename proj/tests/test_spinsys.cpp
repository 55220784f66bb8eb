#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "spinres/constants.hpp"
#include "spinres/errors.hpp"
#include "spinres/spin_system.hpp"

using namespace spinres;
namespace cs = spinres::constants;

namespace {

SpinSystem free_electron() {
  SpinSystem s;
  s.electron_spin = 0.5;
  s.nuclear_spin = 0.0;
  s.label = "free electron";
  return s;
}

SpinSystem phosphorus_like() {
  SpinSystem s;
  s.electron_spin = 0.5;
  s.nuclear_spin = 0.5;
  s.g_e = 1.9985;
  s.g_n = 2.2632;
  s.hyperfine_hz = 117.53e6;
  s.label = "P:Si-like";
  return s;
}

SpinSystem bismuth_like() {
  SpinSystem s;
  s.electron_spin = 0.5;
  s.nuclear_spin = 4.5;
  s.g_e = 2.0032;
  s.g_n = 0.9135;
  s.hyperfine_hz = 1.4754e9;
  s.label = "Bi:Si-like";
  return s;
}

}  // namespace

TEST_CASE("angular momentum operators satisfy the algebra") {
  const std::complex<double> im{0.0, 1.0};
  for (double j : {0.5, 1.0, 1.5, 4.5}) {
    const SpinOperators ops = angular_momentum_operators(j);
    const int n = static_cast<int>(2 * j + 1.5);
    const Eigen::MatrixXcd comm = ops.x * ops.y - ops.y * ops.x - im * ops.z;
    CHECK(comm.norm() < 1e-13 * std::max(1.0, j * j));
    const Eigen::MatrixXcd casimir =
        ops.x * ops.x + ops.y * ops.y + ops.z * ops.z -
        j * (j + 1.0) * Eigen::MatrixXcd::Identity(n, n);
    CHECK(casimir.norm() < 1e-12 * j * (j + 1.0));
    CHECK((ops.x - ops.x.adjoint()).norm() == 0.0);
    CHECK((ops.y - ops.y.adjoint()).norm() == 0.0);
    CHECK((ops.z - ops.z.adjoint()).norm() == 0.0);
  }
}

TEST_CASE("hamiltonian is Hermitian and basis ordering follows the convention") {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    SpinSystem s;
    s.electron_spin = 0.5 + std::floor(u(rng) * 3.0) * 0.5;
    s.nuclear_spin = std::floor(u(rng) * 10.0) * 0.5;
    s.g_e = 1.5 + u(rng);
    s.g_n = -2.0 + 4.0 * u(rng);
    s.hyperfine_hz = 2e9 * u(rng);
    const double b = u(rng);
    const Eigen::MatrixXcd h = build_hamiltonian(s, b);
    CHECK((h - h.adjoint()).norm() <= 1e-14 * std::max(1.0, h.norm()));
  }

  // First basis state is |m_S=+S, m_I=+I>.
  const SpinSystem bi = bismuth_like();
  const Eigen::MatrixXcd hz = zeeman_hamiltonian(bi, 0.1);
  const double expected = bi.g_e * cs::mu_bohr / cs::hbar * 0.1 * 0.5 -
                          bi.g_n * cs::mu_nuclear / cs::hbar * 0.1 * 4.5;
  CHECK(hz(0, 0).real() == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("zeeman part is traceless and the full trace is field independent") {
  for (const SpinSystem& s : {free_electron(), phosphorus_like(), bismuth_like()}) {
    const Eigen::MatrixXcd hz = zeeman_hamiltonian(s, 0.35);
    CHECK(std::abs(hz.trace()) <= 1e-13 * std::max(1.0, hz.norm()));
    const double t0 = std::abs(build_hamiltonian(s, 0.0).trace());
    const double t1 = std::abs(build_hamiltonian(s, 0.7).trace());
    const double scale = std::max(1.0, build_hamiltonian(s, 0.7).norm());
    CHECK(std::abs(t1 - t0) <= 1e-12 * scale);
  }
}

TEST_CASE("spin-1/2 eigenvalues match the closed form to 1e-12 relative") {
  struct Case {
    double nuclear_spin, g_e, g_n, a_hz;
  };
  for (const Case& c : {Case{0.5, 1.9985, 2.2632, 117.53e6},
                        Case{0.5, 2.00231930436256, -1.2, 9.3e8},
                        Case{4.5, 2.0032, 0.9135, 1.4754e9}}) {
    SpinSystem s;
    s.electron_spin = 0.5;
    s.nuclear_spin = c.nuclear_spin;
    s.g_e = c.g_e;
    s.g_n = c.g_n;
    s.hyperfine_hz = c.a_hz;
    for (int k = 0; k <= 25; ++k) {
      const double b = 0.5 * k / 25.0;
      const EigenSystem eig = eigensystem_at(s, b);
      const std::vector<double> ref =
          oracle::breit_rabi_levels(c.nuclear_spin, c.g_e, c.g_n, c.a_hz, b);
      REQUIRE(static_cast<int>(ref.size()) == eig.energies.size());
      const double scale = std::max(std::abs(ref.front()), std::abs(ref.back()));
      for (std::size_t q = 0; q < ref.size(); ++q)
        CHECK(std::abs(eig.energies[static_cast<int>(q)] - ref[q]) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("eigensystem contract: ordering, orthonormality, reconstruction") {
  std::mt19937_64 rng(777);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int n = 12;
  Eigen::MatrixXcd a(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) a(r, c) = std::complex<double>(gauss(rng), gauss(rng));
  const Eigen::MatrixXcd h = 0.5 * (a + a.adjoint());

  const EigenSystem eig = eigensystem(h);
  for (int k = 1; k < n; ++k) CHECK(eig.energies[k] >= eig.energies[k - 1]);
  const Eigen::MatrixXcd gram =
      eig.states.adjoint() * eig.states - Eigen::MatrixXcd::Identity(n, n);
  CHECK(gram.norm() < 1e-10);
  const Eigen::MatrixXcd resid =
      h * eig.states - eig.states * eig.energies.asDiagonal().toDenseMatrix().cast<std::complex<double>>();
  CHECK(resid.norm() < 1e-9 * std::max(1.0, h.norm()));

  // Diagonal input comes back sorted with permutation eigenvectors.
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(4, 4);
  d(0, 0) = 3.0;
  d(1, 1) = -1.0;
  d(2, 2) = 2.0;
  d(3, 3) = 0.5;
  const EigenSystem ed = eigensystem(d);
  CHECK(ed.energies[0] == doctest::Approx(-1.0));
  CHECK(ed.energies[3] == doctest::Approx(3.0));
  for (int k = 0; k < 4; ++k) {
    Eigen::VectorXd mags = ed.states.col(k).cwiseAbs();
    CHECK(mags.maxCoeff() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("eigensystem rejects non-Hermitian input") {
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(3, 3);
  h(0, 1) = 1.0;
  CHECK_THROWS_AS(eigensystem(h), InvalidInputError);
}

TEST_CASE("free-electron spectrum at 0.3 T") {
  const SpinSystem s = free_electron();
  const auto lines = transitions(s, 0.3, 0.1);
  REQUIRE(lines.size() == 1);
  const double f_expected = cs::g_electron * cs::mu_bohr * 0.3 / cs::h_planck;
  CHECK(lines[0].frequency_hz == doctest::Approx(f_expected).epsilon(1e-12));
  CHECK(lines[0].frequency_hz == doctest::Approx(8.4e9).epsilon(0.005));
  CHECK(lines[0].matrix_element == doctest::Approx(0.5).epsilon(1e-12));
  REQUIRE(lines[0].dfdb_hz_per_t.has_value());
  CHECK(*lines[0].dfdb_hz_per_t ==
        doctest::Approx(cs::gyro_electron / (2.0 * cs::pi)).epsilon(1e-9));
  CHECK(*lines[0].dfdb_hz_per_t == doctest::Approx(28.02e9).epsilon(1e-3));
}

TEST_CASE("high-field I=9/2 system shows exactly ten strong lines") {
  const SpinSystem bi = bismuth_like();
  const double field = 2.0;
  const auto lines = transitions(bi, field, 0.25);
  const int ref = oracle::count_strong_transitions(bi.nuclear_spin, bi.g_e, bi.g_n,
                                                   bi.hyperfine_hz, field, 0.25);
  CHECK(ref == 10);
  CHECK(static_cast<int>(lines.size()) == ref);
  for (std::size_t k = 1; k < lines.size(); ++k)
    CHECK(lines[k].frequency_hz >= lines[k - 1].frequency_hz);
}

TEST_CASE("transition properties: element bounds, non-negative sorted frequencies") {
  const SpinSystem bi = bismuth_like();
  for (double b : {0.01, 0.1, 0.35}) {
    const auto lines = transitions(bi, b, 0.0);
    CHECK(lines.size() == 190);  // all level pairs of a 20-level system
    for (const auto& t : lines) {
      CHECK(t.frequency_hz >= 0.0);
      CHECK(t.matrix_element >= 0.0);
      CHECK(t.matrix_element <= bi.electron_spin + 1e-12);
    }
  }
  CHECK(transitions(bi, 0.1, std::numeric_limits<double>::infinity()).empty());
}

TEST_CASE("field derivative agrees with central finite differences") {
  const SpinSystem bi = bismuth_like();
  const double h = 1e-6;
  for (double b : {0.05, 0.11, 0.25}) {
    const auto lines = transitions(bi, b, 0.2);
    REQUIRE(!lines.empty());
    for (const auto& t : lines) {
      const double analytic = transition_dfdb(bi, t, b);
      auto freq_at = [&](double field) {
        const EigenSystem eig = eigensystem_at(bi, field);
        return (eig.energies[t.level_hi] - eig.energies[t.level_lo]) / (2.0 * cs::pi);
      };
      const double fd = (freq_at(b + h) - freq_at(b - h)) / (2.0 * h);
      CHECK(std::abs(analytic - fd) <= 1e-6 * std::abs(fd));
    }
  }
}

TEST_CASE("degenerate spectrum raises the degenerate-level error") {
  const SpinSystem bi = bismuth_like();
  Transition t;
  t.level_lo = 0;
  t.level_hi = 10;
  CHECK_THROWS_AS(transition_dfdb(bi, t, 0.0), DegenerateLevelError);
}

TEST_CASE("clock search: none for a bare electron, four operating points for Bi-like") {
  CHECK(find_clock_transitions(free_electron(), 0.0, 0.5, 200).empty());

  const SpinSystem bi = bismuth_like();
  const auto points = find_clock_transitions(bi, 0.0, 0.3, 400);
  REQUIRE(points.size() == 4);
  double prev_field = 0.0;
  double prev_freq = std::numeric_limits<double>::infinity();
  for (const auto& ct : points) {
    CHECK(ct.field_t > prev_field);
    CHECK(ct.field_t > 0.02);
    CHECK(ct.field_t < 0.2);
    CHECK(ct.transition.frequency_hz > 5.0e9);
    CHECK(ct.transition.frequency_hz < 7.5e9);
    CHECK(ct.transition.frequency_hz < prev_freq);  // higher field, lower line
    CHECK(std::abs(*ct.transition.dfdb_hz_per_t) < 1e3);
    CHECK(ct.curvature_hz_per_t2 > 0.0);  // all four are frequency minima
    CHECK(ct.multiplicity() == 2);        // doublet partners share each point
    prev_field = ct.field_t;
    prev_freq = ct.transition.frequency_hz;
  }

  // Count and positions are stable when the scan grid is refined 10x.
  const auto fine = find_clock_transitions(bi, 0.0, 0.3, 4000);
  REQUIRE(fine.size() == points.size());
  for (std::size_t k = 0; k < fine.size(); ++k)
    CHECK(std::abs(fine[k].field_t - points[k].field_t) < 1e-6);
}

TEST_CASE("clock search validates its inputs") {
  const SpinSystem bi = bismuth_like();
  CHECK_THROWS_AS(find_clock_transitions(bi, 0.3, 0.1, 100), InvalidInputError);
  CHECK_THROWS_AS(find_clock_transitions(bi, 0.0, 0.3, 1), InvalidInputError);
  SpinSystem bad = bi;
  bad.electron_spin = 0.4;
  CHECK_THROWS_AS(build_hamiltonian(bad, 0.1), InvalidInputError);
}
