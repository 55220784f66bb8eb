#include "spinres/ensemble.hpp"

#include <cmath>
#include <random>
#include <utility>

#include "spinres/constants.hpp"
#include "spinres/errors.hpp"

namespace spinres {

namespace {

void check_members(const std::vector<SpinMember>& members) {
  if (members.empty()) throw InvalidInputError("ensemble needs at least one member");
  for (const auto& m : members) {
    if (!std::isfinite(m.g) || m.g < 0.0)
      throw InvalidInputError("member coupling must be finite and non-negative");
    if (!std::isfinite(m.delta)) throw InvalidInputError("member detuning must be finite");
  }
}

}  // namespace

SpinEnsemble SpinEnsemble::from_members(std::vector<SpinMember> members) {
  check_members(members);
  SpinEnsemble e;
  e.total_ = static_cast<double>(members.size());
  e.members_ = std::move(members);
  return e;
}

SpinEnsemble SpinEnsemble::from_members(std::vector<SpinMember> members, double represented_total) {
  check_members(members);
  if (!std::isfinite(represented_total) || represented_total < static_cast<double>(members.size()))
    throw InvalidInputError("represented total must be finite and at least the sample size");
  SpinEnsemble e;
  e.total_ = represented_total;
  e.members_ = std::move(members);
  return e;
}

SpinEnsemble SpinEnsemble::uniform(double total, double g0, double delta) {
  if (!std::isfinite(total) || total < 1.0)
    throw InvalidInputError("uniform ensemble needs total >= 1");
  if (!std::isfinite(g0) || g0 < 0.0) throw InvalidInputError("coupling must be non-negative");
  if (!std::isfinite(delta)) throw InvalidInputError("detuning must be finite");
  SpinEnsemble e;
  e.total_ = total;
  e.members_ = {SpinMember{g0, delta}};
  e.identical_ = true;
  return e;
}

SpinEnsemble SpinEnsemble::sampled(const EnsembleGenerator& gen) {
  if (gen.sample_count == 0) throw InvalidInputError("sample_count must be positive");
  if (!(gen.density_per_m3 > 0.0) || !std::isfinite(gen.density_per_m3))
    throw InvalidInputError("density must be positive");
  if (!gen.resonator.wire) throw InvalidInputError("generator resonator needs wire geometry");
  if (!((gen.region.hi - gen.region.lo).minCoeff() > 0.0))
    throw InvalidInputError("region must have positive extent on every axis");
  if (!(gen.matrix_element > 0.0)) throw InvalidInputError("matrix element must be positive");
  if (!(gen.min_wire_distance_m > 0.0))
    throw InvalidInputError("min wire distance must be positive");
  gen.resonator.validate();

  const double population = gen.density_per_m3 * gen.region.volume();
  if (population < 1.0) throw InvalidInputError("region holds less than one spin on average");

  const double i_zpf = zero_point_current(gen.resonator);
  const double gyro = gen.g_factor * constants::mu_bohr / constants::hbar;

  std::mt19937_64 rng(gen.seed);
  std::uniform_real_distribution<double> ux(gen.region.lo.x(), gen.region.hi.x());
  std::uniform_real_distribution<double> uy(gen.region.lo.y(), gen.region.hi.y());
  std::uniform_real_distribution<double> uz(gen.region.lo.z(), gen.region.hi.z());

  // Detuning sampler, widths converted FWHM -> distribution parameter.
  std::normal_distribution<double> gauss(0.0, gen.detuning.fwhm_hz / (2.0 * std::sqrt(2.0 * std::log(2.0))));
  std::cauchy_distribution<double> lorentz(0.0, gen.detuning.fwhm_hz / 2.0);
  if (gen.detuning.shape != DetuningSpec::Shape::none && !(gen.detuning.fwhm_hz > 0.0))
    throw InvalidInputError("detuning width must be positive for a broadened line");

  const Eigen::Vector3d axis = gen.resonator.wire->direction.normalized();
  std::vector<SpinMember> members;
  members.reserve(gen.sample_count);
  while (members.size() < gen.sample_count) {
    const Eigen::Vector3d pos(ux(rng), uy(rng), uz(rng));
    const Eigen::Vector3d rel = pos - gen.resonator.wire->point;
    const double dist = (rel - rel.dot(axis) * axis).norm();
    if (dist < gen.min_wire_distance_m) continue;  // unphysically close, inside the conductor

    const Eigen::Vector3d db = field_at_point(*gen.resonator.wire, i_zpf, pos);
    // Static field along z; only the transverse zero-point field drives the spin.
    const double db_perp = std::hypot(db.x(), db.y());
    const double g = gen.matrix_element * gyro * db_perp;

    double delta = 0.0;
    switch (gen.detuning.shape) {
      case DetuningSpec::Shape::none: break;
      case DetuningSpec::Shape::gaussian: delta = constants::angular(gauss(rng)); break;
      case DetuningSpec::Shape::lorentzian: delta = constants::angular(lorentz(rng)); break;
    }
    members.push_back(SpinMember{g, delta});
  }

  SpinEnsemble e;
  e.total_ = population;  // sample stands in for the full population, either direction
  e.members_ = std::move(members);
  return e;
}

std::vector<SpinMember> SpinEnsemble::materialize(std::size_t count) const {
  if (count == 0) throw InvalidInputError("materialize needs count >= 1");
  if (identical_) return std::vector<SpinMember>(count, members_.front());
  if (count != members_.size())
    throw InvalidInputError("listed ensemble can only materialize its own member count");
  return members_;
}

double ensemble_coupling(const SpinEnsemble& e) {
  double sum_sq = 0.0;
  for (const auto& m : e.members()) sum_sq += m.g * m.g;
  const double rescale = e.total() / static_cast<double>(e.members().size());
  return std::sqrt(sum_sq * rescale);
}

double thermal_polarization(double temperature_k, double frequency_hz) {
  if (temperature_k < 0.0 || !std::isfinite(temperature_k))
    throw InvalidInputError("temperature must be non-negative");
  if (frequency_hz < 0.0 || !std::isfinite(frequency_hz))
    throw InvalidInputError("frequency must be non-negative");
  if (temperature_k == 0.0 && frequency_hz == 0.0)
    throw InvalidInputError("polarization undefined at zero temperature and zero frequency");
  if (temperature_k == 0.0) return 1.0;
  return std::tanh(constants::h_planck * frequency_hz / (2.0 * constants::k_boltzmann * temperature_k));
}

SpinLifetimes SpinLifetimes::from_rates(double gamma1, double gamma2, double gamma2_star) {
  for (double g : {gamma1, gamma2, gamma2_star})
    if (g < 0.0 || !std::isfinite(g)) throw InvalidInputError("rates must be finite and non-negative");
  if (gamma2 < 0.5 * gamma1) throw InvalidInputError("gamma2 must be at least gamma1/2 (T2 <= 2 T1)");
  if (gamma2_star < gamma2) throw InvalidInputError("gamma2_star must be at least gamma2 (T2* <= T2)");
  return SpinLifetimes{gamma1, gamma2, gamma2_star};
}

SpinLifetimes SpinLifetimes::from_times(double t1_s, double t2_s, double t2_star_s) {
  for (double t : {t1_s, t2_s, t2_star_s})
    if (!(t > 0.0)) throw InvalidInputError("lifetimes must be positive (use infinity for no decay)");
  return from_rates(1.0 / t1_s, 1.0 / t2_s, 1.0 / t2_star_s);
}

namespace {

// Ratio with the regime convention: a positive left side over a vanishing
// right side is infinitely satisfied, 0/0 counts as not reached.
double margin(double left, double right) {
  if (right > 0.0) return left / right;
  return left > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

}  // namespace

RegimeReport classify_regime(double g_ens, double g0, double kappa, const SpinLifetimes& rates) {
  if (g_ens < 0.0 || g0 < 0.0 || kappa < 0.0)
    throw InvalidInputError("rates must be non-negative");
  if (!std::isfinite(g_ens) || !std::isfinite(g0) || !std::isfinite(kappa))
    throw InvalidInputError("rates must be finite");

  const double coop_ens = margin(4.0 * g_ens * g_ens, kappa);
  const double coop_single = margin(4.0 * g0 * g0, kappa);

  RegimeReport r;
  r.margin_strong_coupling = margin(g_ens, std::max(kappa, rates.gamma2_star));
  r.margin_high_coop_ensemble = margin(coop_ens, rates.gamma2_star);
  r.margin_high_coop_single = margin(coop_single, rates.gamma2);
  r.margin_purcell = margin(coop_single, rates.gamma1);
  r.strong_coupling_ensemble = r.margin_strong_coupling > 1.0;
  r.high_cooperativity_ensemble = r.margin_high_coop_ensemble > 1.0;
  r.high_cooperativity_single = r.margin_high_coop_single > 1.0;
  r.purcell_dominated = r.margin_purcell > 1.0;
  return r;
}

double min_q_for_strong_coupling(double omega_c, double g_ens, double gamma2_star) {
  if (!(omega_c > 0.0)) throw InvalidInputError("cavity frequency must be positive");
  if (!(g_ens > 0.0)) throw InvalidInputError("ensemble coupling must be positive");
  if (gamma2_star < 0.0) throw InvalidInputError("gamma2_star must be non-negative");
  if (g_ens <= gamma2_star)
    throw UnreachableRegimeError("ensemble coupling does not exceed inhomogeneous linewidth; no quality factor reaches strong coupling");
  return omega_c / g_ens;
}

}  // namespace spinres
