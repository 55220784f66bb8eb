#include "spinres/spin_system.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "spinres/constants.hpp"
#include "spinres/errors.hpp"

namespace spinres {

namespace {

using constants::hbar;
using constants::mu_bohr;
using constants::mu_nuclear;
using constants::pi;

constexpr std::complex<double> ci{0.0, 1.0};

// Energy gap below which two levels count as degenerate: 1 Hz.
constexpr double degenerate_gap = 2.0 * pi * 1.0;

bool is_half_integer(double x) {
  return std::isfinite(x) && std::abs(2.0 * x - std::round(2.0 * x)) < 1e-9;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c)
      out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
  return out;
}

Eigen::MatrixXcd identity(int n) { return Eigen::MatrixXcd::Identity(n, n); }

// Sx in the composite basis.
Eigen::MatrixXcd electron_sx(const SpinSystem& sys) {
  return kron(angular_momentum_operators(sys.electron_spin).x, identity(sys.nuclear_dim()));
}

// Diagonal of dH/dB in the product basis [rad/s per T]; H is linear in B.
Eigen::VectorXd field_derivative_diagonal(const SpinSystem& sys) {
  const int ne = sys.electron_dim();
  const int ni = sys.nuclear_dim();
  const double ge = sys.g_e * mu_bohr / hbar;
  const double gn = sys.g_n * mu_nuclear / hbar;
  Eigen::VectorXd d(ne * ni);
  for (int a = 0; a < ne; ++a) {
    const double ms = sys.electron_spin - a;
    for (int b = 0; b < ni; ++b) {
      const double mi = sys.nuclear_spin - b;
      d[a * ni + b] = ge * ms - gn * mi;
    }
  }
  return d;
}

// dE_k/dB for every level via expectation values of the (diagonal) dH/dB.
Eigen::VectorXd level_slopes(const SpinSystem& sys, const EigenSystem& eig) {
  const Eigen::VectorXd d = field_derivative_diagonal(sys);
  return eig.states.cwiseAbs2().transpose() * d;
}

double min_gap_around(const Eigen::VectorXd& energies, int level) {
  double gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < energies.size(); ++k) {
    if (k == level) continue;
    gap = std::min(gap, std::abs(energies[k] - energies[level]));
  }
  return gap;
}

double pair_dfdb(const SpinSystem& sys, int lo, int hi, double field_t) {
  const EigenSystem eig = eigensystem_at(sys, field_t);
  if (min_gap_around(eig.energies, lo) < degenerate_gap ||
      min_gap_around(eig.energies, hi) < degenerate_gap) {
    throw DegenerateLevelError("degenerate level at B = " + std::to_string(field_t) + " T");
  }
  const Eigen::VectorXd slopes = level_slopes(sys, eig);
  return (slopes[hi] - slopes[lo]) / (2.0 * pi);
}

}  // namespace

void SpinSystem::validate() const {
  if (!is_half_integer(electron_spin) || electron_spin < 0.5)
    throw InvalidInputError("electron spin must be a half-integer >= 1/2");
  if (!is_half_integer(nuclear_spin) || nuclear_spin < 0.0)
    throw InvalidInputError("nuclear spin must be a non-negative half-integer");
  if (!std::isfinite(g_e) || !std::isfinite(g_n))
    throw InvalidInputError("g-factors must be finite");
  if (!std::isfinite(hyperfine_hz))
    throw InvalidInputError("hyperfine constant must be finite");
}

SpinOperators angular_momentum_operators(double j) {
  if (!is_half_integer(j) || j < 0.0)
    throw InvalidInputError("spin quantum number must be a non-negative half-integer");
  const int n = static_cast<int>(2.0 * j + 1.5);
  Eigen::MatrixXcd plus = Eigen::MatrixXcd::Zero(n, n);
  Eigen::MatrixXcd z = Eigen::MatrixXcd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    const double m = j - k;
    z(k, k) = m;
    if (k > 0) plus(k - 1, k) = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
  }
  const Eigen::MatrixXcd minus = plus.adjoint();
  SpinOperators ops;
  ops.x = 0.5 * (plus + minus);
  ops.y = -0.5 * ci * (plus - minus);
  ops.z = z;
  return ops;
}

Eigen::MatrixXcd zeeman_hamiltonian(const SpinSystem& sys, double field_t) {
  sys.validate();
  if (!std::isfinite(field_t)) throw InvalidInputError("field must be finite");
  const SpinOperators se = angular_momentum_operators(sys.electron_spin);
  const SpinOperators si = angular_momentum_operators(sys.nuclear_spin);
  const double ge = sys.g_e * mu_bohr / hbar;
  const double gn = sys.g_n * mu_nuclear / hbar;
  return ge * field_t * kron(se.z, identity(sys.nuclear_dim())) -
         gn * field_t * kron(identity(sys.electron_dim()), si.z);
}

Eigen::MatrixXcd hyperfine_hamiltonian(const SpinSystem& sys) {
  sys.validate();
  const SpinOperators se = angular_momentum_operators(sys.electron_spin);
  const SpinOperators si = angular_momentum_operators(sys.nuclear_spin);
  const double a = 2.0 * pi * sys.hyperfine_hz;
  return a * (kron(se.x, si.x) + kron(se.y, si.y) + kron(se.z, si.z));
}

Eigen::MatrixXcd build_hamiltonian(const SpinSystem& sys, double field_t) {
  return zeeman_hamiltonian(sys, field_t) + hyperfine_hamiltonian(sys);
}

EigenSystem eigensystem(const Eigen::MatrixXcd& hamiltonian) {
  if (hamiltonian.rows() != hamiltonian.cols())
    throw InvalidInputError("hamiltonian must be square");
  const double scale = std::max(1.0, hamiltonian.norm());
  if ((hamiltonian - hamiltonian.adjoint()).norm() > 1e-12 * scale)
    throw InvalidInputError("hamiltonian must be Hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(hamiltonian);
  if (solver.info() != Eigen::Success)
    throw NumericalInstabilityError("eigensolver failed to converge");
  return EigenSystem{solver.eigenvalues(), solver.eigenvectors()};
}

EigenSystem eigensystem_at(const SpinSystem& sys, double field_t) {
  EigenSystem eig = eigensystem(build_hamiltonian(sys, field_t));
  // Deterministic ordering inside degenerate groups: ascending <Sz>.
  const int dim = static_cast<int>(eig.energies.size());
  const double span = std::max(1.0, eig.energies.cwiseAbs().maxCoeff());
  const double tie_tol = 1e-12 * span;
  const Eigen::MatrixXcd sz = kron(angular_momentum_operators(sys.electron_spin).z,
                                   identity(sys.nuclear_dim()));
  int start = 0;
  while (start < dim) {
    int stop = start + 1;
    while (stop < dim && eig.energies[stop] - eig.energies[stop - 1] <= tie_tol) ++stop;
    if (stop - start > 1) {
      std::vector<int> idx(stop - start);
      for (int k = 0; k < stop - start; ++k) idx[k] = start + k;
      auto sz_expect = [&](int k) {
        return (eig.states.col(k).adjoint() * sz * eig.states.col(k))(0).real();
      };
      std::stable_sort(idx.begin(), idx.end(),
                       [&](int a, int b) { return sz_expect(a) < sz_expect(b); });
      Eigen::VectorXd e(stop - start);
      Eigen::MatrixXcd v(dim, stop - start);
      for (int k = 0; k < stop - start; ++k) {
        e[k] = eig.energies[idx[k]];
        v.col(k) = eig.states.col(idx[k]);
      }
      eig.energies.segment(start, stop - start) = e;
      eig.states.middleCols(start, stop - start) = v;
    }
    start = stop;
  }
  return eig;
}

std::vector<Transition> transitions(const SpinSystem& sys, double field_t,
                                    double min_matrix_element) {
  const EigenSystem eig = eigensystem_at(sys, field_t);
  const Eigen::MatrixXcd sx = electron_sx(sys);
  const Eigen::VectorXd slopes = level_slopes(sys, eig);
  const int dim = static_cast<int>(eig.energies.size());

  std::vector<double> gaps(dim);
  for (int k = 0; k < dim; ++k) gaps[k] = min_gap_around(eig.energies, k);

  std::vector<Transition> out;
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      const double element = std::abs((eig.states.col(j).adjoint() * sx * eig.states.col(i))(0));
      if (!(element >= min_matrix_element)) continue;
      Transition t;
      t.level_lo = i;
      t.level_hi = j;
      t.frequency_hz = (eig.energies[j] - eig.energies[i]) / (2.0 * pi);
      t.matrix_element = element;
      t.field_t = field_t;
      if (gaps[i] >= degenerate_gap && gaps[j] >= degenerate_gap)
        t.dfdb_hz_per_t = (slopes[j] - slopes[i]) / (2.0 * pi);
      out.push_back(t);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const Transition& a, const Transition& b) { return a.frequency_hz < b.frequency_hz; });
  return out;
}

double transition_dfdb(const SpinSystem& sys, const Transition& t, double field_t) {
  sys.validate();
  if (t.level_lo < 0 || t.level_hi >= sys.dim() || t.level_lo >= t.level_hi)
    throw InvalidInputError("transition level indices out of range");
  return pair_dfdb(sys, t.level_lo, t.level_hi, field_t);
}

std::vector<ClockTransition> find_clock_transitions(const SpinSystem& sys,
                                                    double field_lo, double field_hi,
                                                    int grid_points,
                                                    const ClockSearchOptions& opts) {
  sys.validate();
  if (!(field_hi > field_lo) || field_lo < 0.0)
    throw InvalidInputError("field range must satisfy 0 <= field_lo < field_hi");
  if (grid_points < 2) throw InvalidInputError("grid must have at least 2 points");

  const int dim = sys.dim();
  const int n_pairs = dim * (dim - 1) / 2;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  // df/dB for every level pair at every grid field; NaN marks fields with a
  // quasi-degenerate spectrum (where the level derivative is ill-defined).
  std::vector<double> fields(grid_points);
  Eigen::MatrixXd table(n_pairs, grid_points);
  for (int k = 0; k < grid_points; ++k) {
    fields[k] = field_lo + (field_hi - field_lo) * k / (grid_points - 1);
    const EigenSystem eig = eigensystem_at(sys, fields[k]);
    bool degenerate = false;
    for (int l = 0; l + 1 < dim; ++l)
      if (eig.energies[l + 1] - eig.energies[l] < degenerate_gap) degenerate = true;
    if (degenerate) {
      table.col(k).setConstant(nan);
      continue;
    }
    const Eigen::VectorXd slopes = level_slopes(sys, eig);
    int p = 0;
    for (int i = 0; i < dim; ++i)
      for (int j = i + 1; j < dim; ++j)
        table(p++, k) = (slopes[j] - slopes[i]) / (2.0 * pi);
  }

  auto dfdb_guarded = [&](int lo, int hi, double b) -> double {
    try {
      return pair_dfdb(sys, lo, hi, b);
    } catch (const DegenerateLevelError&) {
      return pair_dfdb(sys, lo, hi, b + 1e-9);  // nudge off an isolated degeneracy
    }
  };

  std::vector<ClockTransition> found;
  int p = 0;
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j, ++p) {
      int prev = -1;
      for (int k = 0; k < grid_points; ++k) {
        if (std::isnan(table(p, k))) continue;
        if (prev >= 0) {
          const double f0 = table(p, prev);
          const double f1 = table(p, k);
          if (f0 == 0.0 || f0 * f1 < 0.0) {
            double lo_b = fields[prev], hi_b = fields[k];
            double phi_lo = f0;
            double mid = 0.5 * (lo_b + hi_b);
            for (int iter = 0; iter < 80 && (hi_b - lo_b) > opts.field_resolution_t; ++iter) {
              mid = 0.5 * (lo_b + hi_b);
              const double phi = dfdb_guarded(i, j, mid);
              if ((phi >= 0.0) == (phi_lo >= 0.0)) {
                lo_b = mid;
                phi_lo = phi;
              } else {
                hi_b = mid;
              }
            }
            const double residual = dfdb_guarded(i, j, mid);
            if (std::abs(residual) <= opts.tolerance_hz_per_t) {
              const EigenSystem eig = eigensystem_at(sys, mid);
              const Eigen::MatrixXcd sx = electron_sx(sys);
              const double element =
                  std::abs((eig.states.col(j).adjoint() * sx * eig.states.col(i))(0));
              if (element >= opts.min_matrix_element) {
                ClockTransition ct;
                ct.transition.level_lo = i;
                ct.transition.level_hi = j;
                ct.transition.frequency_hz = (eig.energies[j] - eig.energies[i]) / (2.0 * pi);
                ct.transition.dfdb_hz_per_t = residual;
                ct.transition.matrix_element = element;
                ct.transition.field_t = mid;
                ct.field_t = mid;
                const double h = std::max(1e-6, 1e-4 * (field_hi - field_lo));
                ct.curvature_hz_per_t2 =
                    (dfdb_guarded(i, j, mid + h) - dfdb_guarded(i, j, mid - h)) / (2.0 * h);
                found.push_back(ct);
              }
            }
          }
        }
        prev = k;
      }
    }
  }
  std::sort(found.begin(), found.end(),
            [](const ClockTransition& a, const ClockTransition& b) { return a.field_t < b.field_t; });

  // Group roots that sit within merge_radius_t of each other into a single
  // operating point (doublet partners in high-I systems).
  std::vector<ClockTransition> merged;
  std::size_t k = 0;
  while (k < found.size()) {
    std::size_t stop = k + 1;
    while (stop < found.size() && found[stop].field_t - found[stop - 1].field_t <= opts.merge_radius_t)
      ++stop;
    std::size_t best = k;
    for (std::size_t q = k; q < stop; ++q)
      if (found[q].transition.matrix_element > found[best].transition.matrix_element) best = q;
    ClockTransition point = found[best];
    for (std::size_t q = k; q < stop; ++q) point.components.push_back(found[q].transition);
    merged.push_back(std::move(point));
    k = stop;
  }
  return merged;
}

}  // namespace spinres
