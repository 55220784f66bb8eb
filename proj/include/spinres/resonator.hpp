#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

#include "spinres/spin_system.hpp"

namespace spinres {

/// Infinite thin wire carrying the resonator current, used as the near-field
/// model for inductor-wire coupling estimates.
struct WireGeometry {
  Eigen::Vector3d point = Eigen::Vector3d::Zero();      ///< any point on the axis [m]
  Eigen::Vector3d direction = Eigen::Vector3d::UnitY(); ///< axis direction (normalized on use)
};

/// Lumped-element description of a linear microwave resonator.
struct ResonatorModel {
  double omega_c = 0.0;        ///< mode angular frequency [rad/s]
  double quality = 0.0;        ///< loaded quality factor
  double impedance_ohm = 50.0; ///< characteristic impedance Z = omega_c L
  std::optional<WireGeometry> wire;       ///< inductor wire, if modeled
  std::optional<double> mode_volume_m3;   ///< for Purcell-factor estimates
  std::string label;

  double kappa() const { return omega_c / quality; }       ///< energy decay rate [1/s]
  double inductance() const { return impedance_ohm / omega_c; }
  double wavelength_m() const;                             ///< free-space wavelength

  /// Throws InvalidInputError on non-positive frequency, quality, or impedance.
  void validate() const;
};

/// RMS zero-point current of the mode, i = omega_c sqrt(hbar / 2Z)  [A].
double zero_point_current(const ResonatorModel& r);

/// Magnetostatic field of the wire carrying `current` at `point` [T].
/// Throws SingularGeometryError on the wire axis.
Eigen::Vector3d field_at_point(const WireGeometry& wire, double current,
                               const Eigen::Vector3d& point);

struct CouplingResult {
  double g0 = 0.0;                  ///< single-spin coupling [rad/s]
  double zero_point_field_t = 0.0;  ///< |transverse part of delta B|
  Transition transition;            ///< the transition it was evaluated for
};

/// Single spin-photon coupling for a transition |i> -> |f> of `sys`:
///   hbar g0 = |<f| (g_e mu_B dB.S - g_n mu_N dB.I) |i>|
/// with the static field along b0_direction and the zero-point field delta_b
/// given in the same laboratory frame. Eigenstates are taken at the
/// transition's stored field.
CouplingResult single_spin_coupling(const SpinSystem& sys, const Transition& t,
                                    const Eigen::Vector3d& b0_direction,
                                    const Eigen::Vector3d& delta_b);

/// Cavity-induced relaxation rate at spin-cavity detuning delta [rad/s]:
///   Gamma = (4 g0^2 / kappa) / (1 + (2 delta / kappa)^2)   [1/s].
double purcell_rate(double g0, double kappa, double delta = 0.0);

/// Dimensionless emission enhancement 3 Q lambda^3 / (4 pi^2 V).
double purcell_factor(double quality, double wavelength_m, double mode_volume_m3);

/// Free-space magnetic dipole emission rate mu0 w^3 m^2 / (3 pi hbar c^3) [1/s].
double free_space_emission_rate(double magnetic_moment_j_per_t, double omega);

/// Purcell rate of a nuclear spin with gyromagnetic ratio `ratio` times the
/// electron one, everything else equal: rates scale as ratio^2.
double nuclear_purcell_scaling(double electron_rate, double gyro_ratio);

/// Power needed for a pi pulse of duration t_p given a reference calibration
/// (t_ref, p_ref): P = P_ref (t_ref / t_p)^2  [W].
double pi_pulse_power(double t_p, double t_ref, double p_ref);

}  // namespace spinres
