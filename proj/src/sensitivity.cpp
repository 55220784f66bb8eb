#include "spinres/sensitivity.hpp"

#include <cmath>
#include <limits>

#include "spinres/constants.hpp"
#include "spinres/errors.hpp"
#include "spinres/resonator.hpp"

namespace spinres {

double cooperativity(double g0, double kappa, double gamma2_star) {
  if (!(g0 >= 0.0) || !std::isfinite(g0))
    throw InvalidInputError("coupling must be finite and non-negative");
  if (!(kappa > 0.0) || !(gamma2_star > 0.0))
    throw InvalidInputError("cooperativity needs positive loss rates");
  return 4.0 * g0 * g0 / (kappa * gamma2_star);
}

double thermal_noise_photons(const NoiseModel& noise) {
  if (noise.temperature_k < 0.0 || !std::isfinite(noise.temperature_k))
    throw InvalidInputError("temperature must be non-negative");
  if (!(noise.omega0 > 0.0)) throw InvalidInputError("mode frequency must be positive");
  if (noise.amplifier_added_photons < 0.0 || !std::isfinite(noise.amplifier_added_photons))
    throw InvalidInputError("added noise must be non-negative");
  if (noise.temperature_k == 0.0) return 0.5 + noise.amplifier_added_photons;
  const double x =
      constants::hbar * noise.omega0 / (2.0 * constants::k_boltzmann * noise.temperature_k);
  return 0.5 / std::tanh(x) + noise.amplifier_added_photons;
}

double echo_snr(double n_spins, double polarization, double c0, double noise_photons) {
  if (!(n_spins >= 0.0)) throw InvalidInputError("spin number must be non-negative");
  if (polarization < 0.0 || polarization > 1.0)
    throw InvalidInputError("polarization must lie in [0, 1]");
  if (!(c0 >= 0.0)) throw InvalidInputError("cooperativity must be non-negative");
  if (!(noise_photons >= 0.5))
    throw InvalidInputError("noise photon number cannot drop below the vacuum floor of 1/2");
  return polarization * n_spins * std::sqrt(c0 / noise_photons);
}

double min_spins(double polarization, double c0, double noise_photons) {
  if (polarization < 0.0 || polarization > 1.0)
    throw InvalidInputError("polarization must lie in [0, 1]");
  if (polarization == 0.0)
    throw UndetectableError("unpolarized spins give no echo; no spin number is detectable");
  if (!(c0 > 0.0)) throw InvalidInputError("cooperativity must be positive");
  if (!(noise_photons >= 0.5))
    throw InvalidInputError("noise photon number cannot drop below the vacuum floor of 1/2");
  return std::sqrt(noise_photons / c0) / polarization;
}

double sensitivity_per_root_hz(double n_min, double repetition_hz) {
  if (!(n_min >= 0.0)) throw InvalidInputError("spin number must be non-negative");
  if (!(repetition_hz > 0.0)) throw InvalidInputError("repetition rate must be positive");
  return n_min / std::sqrt(repetition_hz);
}

SensitivityReport full_report(const SensitivityInputs& in) {
  if (!(in.omega0 > 0.0)) throw InvalidInputError("resonator frequency must be positive");
  if (!(in.quality > 0.0)) throw InvalidInputError("quality factor must be positive");
  if (!(in.gamma2_star > 0.0)) throw InvalidInputError("dephasing rate must be positive");
  if (!(in.g0 >= 0.0)) throw InvalidInputError("coupling must be non-negative");
  if (in.polarization < 0.0 || in.polarization > 1.0)
    throw InvalidInputError("polarization must lie in [0, 1]");
  if (!(in.duty_cycle_factor > 0.0) || in.duty_cycle_factor > 1.0)
    throw InvalidInputError("duty cycle factor must lie in (0, 1]");
  if (in.n_spins < 0.0) throw InvalidInputError("spin number must be non-negative");

  SensitivityReport r;
  r.inputs = in;
  r.kappa = in.omega0 / in.quality;
  r.noise_photons = thermal_noise_photons(in.noise);
  r.c0 = cooperativity(in.g0, r.kappa, in.gamma2_star);
  r.purcell_rate = purcell_rate(in.g0, r.kappa);
  r.repetition_hz = in.duty_cycle_factor * r.purcell_rate;

  r.detectable = in.g0 > 0.0 && in.polarization > 0.0;
  if (r.detectable) {
    r.n_min = min_spins(in.polarization, r.c0, r.noise_photons);
    r.n_min_per_rt_hz = sensitivity_per_root_hz(r.n_min, r.repetition_hz);
  } else {
    r.n_min = std::numeric_limits<double>::infinity();
    r.n_min_per_rt_hz = std::numeric_limits<double>::infinity();
  }

  if (in.n_spins > 0.0) {
    r.snr = echo_snr(in.n_spins, in.polarization, r.c0, r.noise_photons);
    r.echo_photons = in.n_spins * in.n_spins * r.c0;
  }

  r.provenance = {
      {"g0", "input"},
      {"omega0", "assumed"},
      {"quality", "assumed"},
      {"gamma2_star", "input"},
      {"polarization", "derived"},
      {"noise_photons", "derived"},
      {"kappa", "derived"},
      {"c0", "derived"},
      {"purcell_rate", "derived"},
      {"duty_cycle_factor", "assumed"},
      {"repetition_hz", "derived"},
      {"n_min", "derived"},
      {"n_min_per_rt_hz", "derived"},
      {"snr", "derived"},
      {"echo_photons", "derived"},
  };
  return r;
}

}  // namespace spinres
