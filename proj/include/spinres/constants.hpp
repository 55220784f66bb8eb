#pragma once

/// Physical constants, CODATA 2018.
///
/// Every dimensionful number in the library traces back to this table.
/// SI units throughout; angular frequencies are rad/s, plain frequencies Hz.

namespace spinres::constants {

inline constexpr double pi = 3.14159265358979323846;

/// Planck constant [J s] (exact).
inline constexpr double h_planck = 6.62607015e-34;

/// Reduced Planck constant [J s].
inline constexpr double hbar = h_planck / (2.0 * pi);

/// Boltzmann constant [J/K] (exact).
inline constexpr double k_boltzmann = 1.380649e-23;

/// Speed of light in vacuum [m/s] (exact).
inline constexpr double c_light = 299792458.0;

/// Vacuum magnetic permeability [N/A^2].
inline constexpr double mu0 = 1.25663706212e-6;

/// Bohr magneton [J/T].
inline constexpr double mu_bohr = 9.2740100783e-24;

/// Nuclear magneton [J/T].
inline constexpr double mu_nuclear = 5.0507837461e-27;

/// Free-electron g-factor (magnitude).
inline constexpr double g_electron = 2.00231930436256;

/// Electron gyromagnetic ratio [rad/s/T], g_e mu_B / hbar.
inline constexpr double gyro_electron = g_electron * mu_bohr / hbar;

/// Proton gyromagnetic ratio [rad/s/T].
inline constexpr double gyro_proton = 2.6752218744e8;

/// Julian year [s]; used only to report very slow rates in friendlier units.
inline constexpr double julian_year = 365.25 * 86400.0;

/// Hz -> rad/s.
inline constexpr double angular(double frequency_hz) { return 2.0 * pi * frequency_hz; }

/// rad/s -> Hz.
inline constexpr double cycles(double omega) { return omega / (2.0 * pi); }

}  // namespace spinres::constants
