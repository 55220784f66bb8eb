#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace spinres {

/// Electron spin S coupled to one nuclear spin I by an isotropic hyperfine
/// interaction, in a static field along z:
///
///   H/hbar = (g_e mu_B / hbar) B Sz - (g_n mu_N / hbar) B Iz + 2 pi A (S . I)
///
/// Energies are angular frequencies (rad/s). The product basis |m_S, m_I> is
/// ordered with m_S descending from +S and, within each m_S, m_I descending
/// from +I; index = i_s * (2I+1) + i_i.
struct SpinSystem {
  double electron_spin = 0.5;  ///< S, non-negative half-integer
  double nuclear_spin = 0.0;   ///< I, non-negative half-integer
  double g_e = 2.00231930436256;
  double g_n = 0.0;            ///< nuclear g-factor, mu = g_n mu_N I
  double hyperfine_hz = 0.0;   ///< isotropic A [Hz]
  std::string label;

  int electron_dim() const { return static_cast<int>(2.0 * electron_spin + 1.5); }
  int nuclear_dim() const { return static_cast<int>(2.0 * nuclear_spin + 1.5); }
  int dim() const { return electron_dim() * nuclear_dim(); }

  /// Throws InvalidInputError unless S and I are non-negative half-integers
  /// and the g-factors and hyperfine constant are finite.
  void validate() const;
};

/// Cartesian angular momentum matrices for total spin j, dimension 2j+1,
/// basis ordered m = j, j-1, ..., -j.
struct SpinOperators {
  Eigen::MatrixXcd x, y, z;
};

SpinOperators angular_momentum_operators(double j);

/// Zeeman part only: (g_e mu_B/hbar) B Sz - (g_n mu_N/hbar) B Iz  [rad/s].
/// Traceless by construction.
Eigen::MatrixXcd zeeman_hamiltonian(const SpinSystem& sys, double field_t);

/// Hyperfine part only: 2 pi A (SxIx + SyIy + SzIz)  [rad/s].
Eigen::MatrixXcd hyperfine_hamiltonian(const SpinSystem& sys);

/// Full Hamiltonian at field B [T], Hermitian, units rad/s.
Eigen::MatrixXcd build_hamiltonian(const SpinSystem& sys, double field_t);

/// Eigenvalues (ascending) and orthonormal eigenvectors (columns).
struct EigenSystem {
  Eigen::VectorXd energies;   ///< rad/s
  Eigen::MatrixXcd states;    ///< column k belongs to energies[k]
};

/// Dense Hermitian eigensolve. Throws InvalidInputError if the input is not
/// Hermitian to within 1e-12 (Frobenius, relative).
EigenSystem eigensystem(const Eigen::MatrixXcd& hamiltonian);

/// Eigensolve of the system Hamiltonian at B. Degenerate groups (same energy
/// to within numerical noise) are ordered by ascending <Sz> so level indices
/// are deterministic.
EigenSystem eigensystem_at(const SpinSystem& sys, double field_t);

/// One allowed transition between two energy-ordered levels.
struct Transition {
  int level_lo = 0;
  int level_hi = 0;
  double frequency_hz = 0.0;                 ///< (E_hi - E_lo)/2pi, >= 0
  std::optional<double> dfdb_hz_per_t;       ///< absent at a degeneracy
  double matrix_element = 0.0;               ///< |<hi| Sx |lo>|, in [0, S]
  double field_t = 0.0;                      ///< field it was evaluated at
};

/// All level pairs at field B whose transverse electron matrix element
/// |<hi|Sx|lo>| reaches min_matrix_element, sorted by frequency.
std::vector<Transition> transitions(const SpinSystem& sys, double field_t,
                                    double min_matrix_element = 0.1);

/// First derivative of a transition frequency with respect to field [Hz/T],
/// from the eigenstate expectation values of dH/dB (exact for H linear in B).
/// Throws DegenerateLevelError if either level sits within 1 Hz of another.
double transition_dfdb(const SpinSystem& sys, const Transition& t, double field_t);

/// Field-insensitive operating point: a transition with df/dB = 0. High-I
/// systems often carry doublets, two level pairs whose frequency extrema sit a
/// fraction of a millitesla apart; those are reported as one operating point
/// whose components list every merged root, with the strongest one up front.
struct ClockTransition {
  Transition transition;              ///< strongest component, at field_t
  double field_t = 0.0;
  double curvature_hz_per_t2 = 0.0;   ///< d2f/dB2 at the operating point
  std::vector<Transition> components; ///< all co-located roots, field-ordered
  int multiplicity() const { return static_cast<int>(components.size()); }
};

struct ClockSearchOptions {
  double min_matrix_element = 0.1;    ///< keep only usefully allowed transitions
  double tolerance_hz_per_t = 1e3;    ///< accept |df/dB| below this at the root
  double field_resolution_t = 1e-12;  ///< bisection stops at this bracket width
  double merge_radius_t = 1e-3;       ///< roots closer than this form one point
};

/// Scan [field_lo, field_hi] on a uniform grid of grid_points for sign
/// changes of df/dB on every level pair, refine each by bisection, and keep
/// roots that meet the tolerance and matrix-element threshold. Grid points
/// with quasi-degenerate spectra are skipped. Roots within merge_radius_t of
/// each other are grouped into one operating point.
std::vector<ClockTransition> find_clock_transitions(const SpinSystem& sys,
                                                    double field_lo, double field_hi,
                                                    int grid_points,
                                                    const ClockSearchOptions& opts = {});

}  // namespace spinres
