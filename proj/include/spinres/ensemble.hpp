#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "spinres/resonator.hpp"

namespace spinres {

/// One spin as the collective-dynamics layer sees it.
struct SpinMember {
  double g = 0.0;      ///< coupling to the cavity mode [rad/s]
  double delta = 0.0;  ///< detuning from the cavity [rad/s]
};

/// Inhomogeneous detuning profile, widths quoted as FWHM in Hz.
struct DetuningSpec {
  enum class Shape { none, gaussian, lorentzian };
  Shape shape = Shape::none;
  double fwhm_hz = 0.0;
};

/// Axis-aligned sample region [m].
struct Box {
  Eigen::Vector3d lo = Eigen::Vector3d::Zero();
  Eigen::Vector3d hi = Eigen::Vector3d::Zero();
  double volume() const { return (hi - lo).prod(); }
};

/// Monte-Carlo description of a doped region near a resonator wire: spins at
/// `density` fill `region`; couplings follow the zero-point wire field at the
/// sampled positions, detunings follow `detuning`. Only sample_count spins are
/// drawn; collective quantities are rescaled to the full population.
struct EnsembleGenerator {
  double density_per_m3 = 0.0;
  Box region;
  ResonatorModel resonator;       ///< must carry a wire
  double g_factor = 2.00231930436256;
  double matrix_element = 0.5;    ///< transition matrix element scaling g
  DetuningSpec detuning;
  std::size_t sample_count = 0;
  std::uint64_t seed = 0;
  double min_wire_distance_m = 1e-8;  ///< resample closer positions
};

/// A spin population. Three construction routes share one representation:
/// explicit members, identical spins given in closed form, and Monte-Carlo
/// samples standing in for a larger population (members.size() < total()).
class SpinEnsemble {
 public:
  /// Every spin listed explicitly.
  static SpinEnsemble from_members(std::vector<SpinMember> members);

  /// `members` is a fair sample representing `represented_total` spins.
  static SpinEnsemble from_members(std::vector<SpinMember> members, double represented_total);

  /// `total` identical spins with coupling g0 and common detuning [rad/s].
  static SpinEnsemble uniform(double total, double g0, double delta = 0.0);

  /// Draw sample_count spins from the generator (deterministic in the seed).
  static SpinEnsemble sampled(const EnsembleGenerator& gen);

  double total() const { return total_; }
  const std::vector<SpinMember>& members() const { return members_; }
  bool subsampled() const { return total_ > static_cast<double>(members_.size()) + 0.5; }

  /// Explicit member list of length `count` for dynamics simulations.
  /// Identical-spin ensembles replicate; listed ensembles require count to
  /// match the stored list.
  std::vector<SpinMember> materialize(std::size_t count) const;

  double polarization = 1.0;  ///< ground-state population imbalance in [0,1]

 private:
  SpinEnsemble() = default;
  std::vector<SpinMember> members_;
  double total_ = 0.0;
  bool identical_ = false;
};

/// Collective coupling sqrt(sum_j g_j^2) [rad/s], rescaled by
/// sqrt(total / sampled) when the ensemble is a subsample.
double ensemble_coupling(const SpinEnsemble& e);

/// Thermal ground-state polarization p = tanh(h f / 2 k_B T).
double thermal_polarization(double temperature_k, double frequency_hz);

/// Relaxation (gamma1 = 1/T1), decoherence (gamma2 = 1/T2) and inhomogeneous
/// dephasing (gamma2_star = 1/T2*) rates [1/s]. Construction enforces
/// gamma2_star >= gamma2 >= gamma1/2 >= 0 (equivalently T2* <= T2 <= 2 T1).
struct SpinLifetimes {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double gamma2_star = 0.0;

  static SpinLifetimes from_rates(double gamma1, double gamma2, double gamma2_star);
  static SpinLifetimes from_times(double t1_s, double t2_s, double t2_star_s);
};

/// Outcome of the standard rate comparisons for a spin-cavity system. Margins
/// are the ratios left/right of each defining inequality; a margin above 1
/// means the regime is reached (infinite when the right side vanishes).
struct RegimeReport {
  bool strong_coupling_ensemble = false;    ///< g_ens > max(kappa, gamma2_star)
  bool high_cooperativity_ensemble = false; ///< 4 g_ens^2 / kappa > gamma2_star
  bool high_cooperativity_single = false;   ///< 4 g0^2 / kappa > gamma2
  bool purcell_dominated = false;           ///< 4 g0^2 / kappa > gamma1
  double margin_strong_coupling = 0.0;
  double margin_high_coop_ensemble = 0.0;
  double margin_high_coop_single = 0.0;
  double margin_purcell = 0.0;
};

RegimeReport classify_regime(double g_ens, double g0, double kappa, const SpinLifetimes& rates);

/// Smallest quality factor reaching ensemble strong coupling, omega_c / g_ens.
/// Throws UnreachableRegimeError when g_ens <= gamma2_star (no Q suffices).
double min_q_for_strong_coupling(double omega_c, double g_ens, double gamma2_star);

}  // namespace spinres
