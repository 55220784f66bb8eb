#pragma once

#include <map>
#include <string>

namespace spinres {

/// Noise temperature model for the detection chain.
struct NoiseModel {
  double temperature_k = 0.0;          ///< physical temperature of the mode
  double omega0 = 0.0;                 ///< mode frequency [rad/s]
  double amplifier_added_photons = 0.0;  ///< 0 for an ideal single-quadrature amplifier
};

/// Experimental anchor values quoted for the demonstrated spectrometer.
/// Stored as reference constants for comparison, never asserted as outputs
/// of the ideal-limit formulas (which exclude the unmodeled losses).
namespace reference {
inline constexpr double demonstrated_min_spins = 260.0;
inline constexpr double demonstrated_repetition_hz = 16.0;
inline constexpr double inferred_sensitivity_per_rt_hz = 65.0;
}  // namespace reference

/// Single-spin cooperativity C0 = 4 g0^2 / (kappa gamma2_star); all rates in
/// consistent angular units.
double cooperativity(double g0, double kappa, double gamma2_star);

/// n = (1/2) coth(hbar omega0 / 2 kB T) + added photons. Monotone in T,
/// tends to 1/2 + added as T -> 0 (T = 0 returns that limit).
double thermal_noise_photons(const NoiseModel& noise);

/// Single-echo signal-to-noise ratio p N sqrt(C0 / n).
double echo_snr(double n_spins, double polarization, double c0, double noise_photons);

/// Minimum detectable spin number sqrt(n / C0) / p; equals 1/sqrt(2 C0)
/// exactly when n = 1/2 and p = 1. Throws UndetectableError at p = 0.
double min_spins(double polarization, double c0, double noise_photons);

/// Averaged sensitivity N_min / sqrt(repetition rate) [spins/sqrt(Hz)].
double sensitivity_per_root_hz(double n_min, double repetition_hz);

/// Inputs for the composed end-to-end estimate.
struct SensitivityInputs {
  double g0 = 0.0;           ///< single-spin coupling [rad/s]
  double omega0 = 0.0;       ///< resonator frequency [rad/s]
  double quality = 0.0;      ///< loaded Q; kappa = omega0 / quality
  double gamma2_star = 0.0;  ///< inhomogeneous dephasing rate [1/s]
  double polarization = 1.0;
  NoiseModel noise;
  double duty_cycle_factor = 1.0 / 3.0;  ///< repetition rate = factor * Purcell rate
  double n_spins = 0.0;      ///< optional: also report SNR and echo photons for this N
};

/// Composed estimate with every intermediate quantity. When nothing couples
/// (g0 = 0) or nothing polarizes (p = 0) the spin count diverges and
/// `detectable` is false instead of an exception.
struct SensitivityReport {
  double c0 = 0.0;
  double noise_photons = 0.0;
  double kappa = 0.0;             ///< [rad/s]
  double purcell_rate = 0.0;      ///< [1/s]
  double repetition_hz = 0.0;
  double n_min = 0.0;             ///< spins (infinite when undetectable)
  double n_min_per_rt_hz = 0.0;   ///< spins/sqrt(Hz)
  double snr = 0.0;               ///< for inputs.n_spins, 0 if not requested
  double echo_photons = 0.0;      ///< N^2 C0 for inputs.n_spins
  bool detectable = true;
  SensitivityInputs inputs;
  /// field name -> "input" | "derived" | "assumed"
  std::map<std::string, std::string> provenance;
};

SensitivityReport full_report(const SensitivityInputs& in);

}  // namespace spinres
