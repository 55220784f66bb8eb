#include "spinres/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <thread>

#include "spinres/constants.hpp"
#include "spinres/errors.hpp"
#include "spinres/memory.hpp"
#include "spinres/version.hpp"

namespace spinres {

namespace {

namespace k = constants;

struct NamedTable {
  std::string name;  ///< file suffix; empty for the subcommand's main table
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct RunContext {
  std::optional<std::uint64_t> seed;
  int threads = 0;
};

struct HandlerOutput {
  json results;
  std::vector<std::string> assumptions;
  std::vector<NamedTable> tables;
};

HandlerOutput dispatch(const std::string& subcommand, const ScenarioFile& sc,
                       const RunContext& ctx);

// ---------------------------------------------------------------- utilities

json cplx(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Replace non-finite numbers with JSON-safe string markers, recursively.
json sanitize(const json& v) {
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isnan(d)) return "NaN";
    if (std::isinf(d)) return d > 0.0 ? "Infinity" : "-Infinity";
    return v;
  }
  if (v.is_object()) {
    json out = json::object();
    for (const auto& [key, value] : v.items()) out[key] = sanitize(value);
    return out;
  }
  if (v.is_array()) {
    json out = json::array();
    for (const auto& value : v) out.push_back(sanitize(value));
    return out;
  }
  return v;
}

const json& section(const json& doc, const char* key) {
  static const json empty = json::object();
  return doc.contains(key) ? doc.at(key) : empty;
}

double get_or(const json& node, const char* key, double fallback) {
  return node.contains(key) && node[key].is_number() ? node[key].get<double>() : fallback;
}

double require(const json& node, const char* key, const std::string& where) {
  if (!node.contains(key) || !node[key].is_number())
    throw ScenarioError(where + ": missing required number \"" + key + "\"");
  return node[key].get<double>();
}

std::optional<std::uint64_t> resolve_seed(const ScenarioFile& sc, const RunContext& ctx) {
  if (ctx.seed) return ctx.seed;
  if (sc.doc.contains("seed") && sc.doc["seed"].is_number_unsigned())
    return sc.doc["seed"].get<std::uint64_t>();
  return std::nullopt;
}

std::optional<ResonatorModel> maybe_resonator(const json& doc) {
  if (!doc.contains("resonator")) return std::nullopt;
  return resonator_from(doc["resonator"]);
}

SpinSystem spin_system_or_free_electron(const json& doc, std::vector<std::string>& assumptions) {
  if (doc.contains("spin_system")) return spin_system_from(doc["spin_system"]);
  assumptions.push_back("no spin_system section; a free electron is assumed");
  return SpinSystem{};
}

json transition_json(const Transition& t) {
  json out;
  out["level_lo"] = t.level_lo;
  out["level_hi"] = t.level_hi;
  out["frequency_hz"] = t.frequency_hz;
  if (t.dfdb_hz_per_t)
    out["dfdb_hz_per_t"] = *t.dfdb_hz_per_t;
  else
    out["dfdb_hz_per_t"] = nullptr;
  out["matrix_element"] = t.matrix_element;
  out["field_t"] = t.field_t;
  return out;
}

// --------------------------------------------------------------- subcommands

HandlerOutput run_spectrum(const ScenarioFile& sc, const RunContext&) {
  HandlerOutput out;
  const json& doc = sc.doc;
  const SpinSystem sys = spin_system_or_free_electron(doc, out.assumptions);
  out.results["dimension"] = sys.dim();

  const bool has_range = doc.contains("field_range_t");
  const bool has_field = doc.contains("field_t");
  if (!has_range && !has_field)
    throw ScenarioError("spectrum needs \"field_range_t\" (level diagram) or \"field_t\" (transition list)");

  if (has_range) {
    const json& r = doc["field_range_t"];
    const double lo = require(r, "min", "field_range_t");
    const double hi = require(r, "max", "field_range_t");
    const int points = static_cast<int>(get_or(r, "points", 201.0));
    NamedTable table;
    table.name = "levels";
    table.columns.push_back("field[T]");
    for (int i = 0; i < sys.dim(); ++i)
      table.columns.push_back("level_" + std::to_string(i) + "[Hz]");
    for (int i = 0; i < points; ++i) {
      const double b = lo + (hi - lo) * (points > 1 ? double(i) / (points - 1) : 0.0);
      const EigenSystem es = eigensystem_at(sys, b);
      std::vector<double> row{b};
      for (int j = 0; j < sys.dim(); ++j) row.push_back(k::cycles(es.energies[j]));
      table.rows.push_back(std::move(row));
    }
    out.results["levels"] = {{"field_min_t", lo}, {"field_max_t", hi}, {"points", points}};
    out.tables.push_back(std::move(table));
  }

  if (has_field) {
    const double b = doc["field_t"].get<double>();
    const double threshold = get_or(section(doc, "clock"), "min_matrix_element", 0.1);
    json list = json::array();
    for (const auto& t : transitions(sys, b, threshold)) list.push_back(transition_json(t));
    out.results["transitions_at_t"] = b;
    out.results["min_matrix_element"] = threshold;
    out.results["transitions"] = std::move(list);
  }
  return out;
}

HandlerOutput run_clock_find(const ScenarioFile& sc, const RunContext&) {
  HandlerOutput out;
  const json& doc = sc.doc;
  const SpinSystem sys = spin_system_or_free_electron(doc, out.assumptions);

  const json& range = section(doc, "field_range_t");
  const double lo = get_or(range, "min", 0.0);
  const double hi = get_or(range, "max", 0.3);
  if (!doc.contains("field_range_t"))
    out.assumptions.push_back("no field_range_t section; searching the default 0 to 0.3 T");

  const json& clock = section(doc, "clock");
  ClockSearchOptions opts;
  opts.min_matrix_element = get_or(clock, "min_matrix_element", opts.min_matrix_element);
  opts.tolerance_hz_per_t = get_or(clock, "tolerance_hz_per_t", opts.tolerance_hz_per_t);
  opts.merge_radius_t = get_or(clock, "merge_radius_t", opts.merge_radius_t);
  const int grid_points = static_cast<int>(get_or(clock, "grid_points", 400.0));

  const auto found = find_clock_transitions(sys, lo, hi, grid_points, opts);

  out.results["search"] = {{"field_min_t", lo},
                           {"field_max_t", hi},
                           {"grid_points", grid_points},
                           {"min_matrix_element", opts.min_matrix_element},
                           {"tolerance_hz_per_t", opts.tolerance_hz_per_t},
                           {"merge_radius_t", opts.merge_radius_t}};
  out.results["count"] = found.size();

  NamedTable table;
  table.name = "points";
  table.columns = {"field[T]", "frequency[Hz]", "curvature[Hz/T^2]", "multiplicity[1]",
                   "matrix_element[1]"};
  json points = json::array();
  for (const auto& ct : found) {
    json p;
    p["field_t"] = ct.field_t;
    p["frequency_hz"] = ct.transition.frequency_hz;
    p["curvature_hz_per_t2"] = ct.curvature_hz_per_t2;
    p["multiplicity"] = ct.multiplicity();
    json comps = json::array();
    for (const auto& c : ct.components) comps.push_back(transition_json(c));
    p["components"] = std::move(comps);
    points.push_back(std::move(p));
    table.rows.push_back({ct.field_t, ct.transition.frequency_hz, ct.curvature_hz_per_t2,
                          double(ct.multiplicity()), ct.transition.matrix_element});
  }
  out.results["operating_points"] = std::move(points);
  out.tables.push_back(std::move(table));
  return out;
}

HandlerOutput run_coupling(const ScenarioFile& sc, const RunContext& ctx) {
  HandlerOutput out;
  const json& doc = sc.doc;
  if (!doc.contains("resonator"))
    throw ScenarioError("coupling runs need a \"resonator\" section");
  const ResonatorModel r = resonator_from(doc["resonator"]);
  const json& cpl = section(doc, "coupling");

  const double i_zpf = zero_point_current(r);
  out.results["i_zpf_a"] = i_zpf;

  // Zero-point field: explicit vector, or the wire field at a sample point.
  Eigen::Vector3d db;
  if (cpl.contains("delta_b_t")) {
    const auto& a = cpl["delta_b_t"];
    if (!a.is_array() || a.size() != 3)
      throw ScenarioError("coupling: \"delta_b_t\" must be an array of three numbers");
    db = {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
  } else if (r.wire && cpl.contains("position_m")) {
    const auto& a = cpl["position_m"];
    Eigen::Vector3d pos{a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
    db = field_at_point(*r.wire, i_zpf, pos);
  } else {
    throw ScenarioError(
        "coupling needs \"delta_b_t\" directly, or a resonator wire plus \"position_m\"");
  }
  out.results["delta_b_t"] = json::array({db.x(), db.y(), db.z()});
  out.results["delta_b_mag_t"] = db.norm();

  const SpinSystem sys = spin_system_or_free_electron(doc, out.assumptions);
  const double field = get_or(doc, "field_t", 0.1);
  if (!doc.contains("field_t"))
    out.assumptions.push_back("no field_t given; transition eigenstates taken at 0.1 T");

  Eigen::Vector3d b0{0.0, 0.0, 1.0};
  if (cpl.contains("b0_direction")) {
    const auto& a = cpl["b0_direction"];
    b0 = {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
  } else {
    out.assumptions.push_back("static field direction assumed along +z");
  }

  const double threshold = get_or(cpl, "min_matrix_element", 0.1);
  NamedTable table;
  table.name = "transitions";
  table.columns = {"level_lo[1]", "level_hi[1]", "frequency[Hz]", "g0[Hz]"};
  json list = json::array();
  for (const auto& t : transitions(sys, field, threshold)) {
    const CouplingResult c = single_spin_coupling(sys, t, b0, db);
    json row = transition_json(t);
    row["g0_hz"] = k::cycles(c.g0);
    row["transverse_db_t"] = c.zero_point_field_t;
    list.push_back(std::move(row));
    table.rows.push_back({double(t.level_lo), double(t.level_hi), t.frequency_hz,
                          k::cycles(c.g0)});
  }
  out.results["field_t"] = field;
  out.results["transitions"] = std::move(list);
  out.tables.push_back(std::move(table));

  if (doc.contains("ensemble")) {
    const SpinEnsemble e = ensemble_from(doc["ensemble"], &r, resolve_seed(sc, ctx));
    out.results["ensemble"] = {{"total", e.total()},
                               {"explicit_members", e.members().size()},
                               {"g_ens_hz", k::cycles(ensemble_coupling(e))}};
  }
  return out;
}

HandlerOutput run_purcell(const ScenarioFile& sc, const RunContext&) {
  HandlerOutput out;
  const json& doc = sc.doc;
  if (!doc.contains("resonator"))
    throw ScenarioError("purcell runs need a \"resonator\" section");
  const ResonatorModel r = resonator_from(doc["resonator"]);
  const json& pc = section(doc, "purcell");

  const double g0 = k::angular(require(pc, "g0_hz", "purcell"));
  const double kappa = r.kappa();
  const double delta = k::angular(get_or(pc, "delta_hz", 0.0));

  const double rate_resonant = purcell_rate(g0, kappa);
  const double rate = purcell_rate(g0, kappa, delta);
  out.results["kappa_hz"] = k::cycles(kappa);
  out.results["rate_resonant_per_s"] = rate_resonant;
  out.results["rate_per_s"] = rate;
  out.results["delta_hz"] = k::cycles(delta);
  out.results["suppression"] = rate > 0.0 ? rate_resonant / rate
                                          : std::numeric_limits<double>::infinity();
  out.results["t1_resonant_s"] = rate_resonant > 0.0
                                     ? 1.0 / rate_resonant
                                     : std::numeric_limits<double>::infinity();

  // Free-space benchmark for a spin-1/2 magnetic dipole.
  const double moment = pc.contains("moment_j_per_t")
                            ? require(pc, "moment_j_per_t", "purcell")
                            : k::g_electron * k::mu_bohr / 2.0;
  if (!pc.contains("moment_j_per_t"))
    out.assumptions.push_back("free-space emitter assumed to be an electron spin-1/2");
  const double free_rate = free_space_emission_rate(moment, r.omega_c);
  out.results["free_space_rate_per_s"] = free_rate;
  out.results["free_space_t1_years"] =
      free_rate > 0.0 ? 1.0 / (free_rate * k::julian_year)
                      : std::numeric_limits<double>::infinity();

  if (r.mode_volume_m3) {
    const double fp = purcell_factor(r.quality, r.wavelength_m(), *r.mode_volume_m3);
    out.results["purcell_factor"] = fp;
    out.results["enhanced_rate_per_s"] = fp * free_rate;
  }

  const double ratio = get_or(pc, "moment_ratio", k::gyro_proton / k::gyro_electron);
  if (!pc.contains("moment_ratio"))
    out.assumptions.push_back("nuclear moment ratio defaulted to the proton/electron value");
  out.results["nuclear"] = {{"moment_ratio", ratio},
                            {"rate_per_s", nuclear_purcell_scaling(rate_resonant, ratio)}};

  if (pc.contains("pulse")) {
    const json& pulse = pc["pulse"];
    const double t_ref = require(pulse, "t_ref_s", "purcell.pulse");
    const double p_ref = require(pulse, "p_ref_w", "purcell.pulse");
    const double t_p = require(pulse, "t_p_s", "purcell.pulse");
    out.results["pulse"] = {{"t_ref_s", t_ref},
                            {"p_ref_w", p_ref},
                            {"t_p_s", t_p},
                            {"power_w", pi_pulse_power(t_p, t_ref, p_ref)}};
  }

  if (pc.contains("delta_range_hz")) {
    const json& dr = pc["delta_range_hz"];
    const double lo = require(dr, "min", "purcell.delta_range_hz");
    const double hi = require(dr, "max", "purcell.delta_range_hz");
    const int points = static_cast<int>(get_or(dr, "points", 201.0));
    NamedTable table;
    table.name = "detuning";
    table.columns = {"delta[Hz]", "rate[1/s]", "suppression[1]"};
    for (int i = 0; i < points; ++i) {
      const double d_hz = lo + (hi - lo) * (points > 1 ? double(i) / (points - 1) : 0.0);
      const double rd = purcell_rate(g0, kappa, k::angular(d_hz));
      table.rows.push_back({d_hz, rd, rd > 0.0 ? rate_resonant / rd
                                               : std::numeric_limits<double>::infinity()});
    }
    out.tables.push_back(std::move(table));
  }
  return out;
}

HandlerOutput run_regime(const ScenarioFile& sc, const RunContext& ctx) {
  HandlerOutput out;
  const json& doc = sc.doc;
  if (!doc.contains("resonator")) throw ScenarioError("regime runs need a \"resonator\" section");
  if (!doc.contains("ensemble")) throw ScenarioError("regime runs need an \"ensemble\" section");
  if (!doc.contains("lifetimes")) throw ScenarioError("regime runs need a \"lifetimes\" section");

  const ResonatorModel r = resonator_from(doc["resonator"]);
  const SpinEnsemble e = ensemble_from(doc["ensemble"], &r, resolve_seed(sc, ctx));
  const SpinLifetimes rates = lifetimes_from(doc["lifetimes"]);

  const double g_ens = ensemble_coupling(e);
  double g0 = 0.0;  // best single spin in the ensemble
  for (const auto& m : e.members()) g0 = std::max(g0, std::abs(m.g));

  const RegimeReport rep = classify_regime(g_ens, g0, r.kappa(), rates);
  out.results["g_ens_hz"] = k::cycles(g_ens);
  out.results["g0_hz"] = k::cycles(g0);
  out.results["kappa_hz"] = k::cycles(r.kappa());
  out.results["gamma1_per_s"] = rates.gamma1;
  out.results["gamma2_per_s"] = rates.gamma2;
  out.results["gamma2_star_per_s"] = rates.gamma2_star;
  out.results["flags"] = {{"strong_coupling_ensemble", rep.strong_coupling_ensemble},
                          {"high_cooperativity_ensemble", rep.high_cooperativity_ensemble},
                          {"high_cooperativity_single", rep.high_cooperativity_single},
                          {"purcell_dominated", rep.purcell_dominated}};
  out.results["margins"] = {{"strong_coupling", rep.margin_strong_coupling},
                            {"high_coop_ensemble", rep.margin_high_coop_ensemble},
                            {"high_coop_single", rep.margin_high_coop_single},
                            {"purcell", rep.margin_purcell}};
  try {
    out.results["min_quality_strong_coupling"] =
        min_q_for_strong_coupling(r.omega_c, g_ens, rates.gamma2_star);
    out.results["strong_coupling_reachable"] = true;
  } catch (const UnreachableRegimeError&) {
    out.results["min_quality_strong_coupling"] = nullptr;
    out.results["strong_coupling_reachable"] = false;
  }
  return out;
}

void append_trace(HandlerOutput& out, const std::vector<TracePoint>& trace) {
  NamedTable table;
  table.name = "trace";
  table.columns = {"time[s]", "re_a[1]", "im_a[1]", "stored_norm[1]", "flux[1/s]"};
  for (const auto& p : trace)
    table.rows.push_back({p.time, p.a.real(), p.a.imag(), p.stored_norm_sq, p.flux_rate});
  out.tables.push_back(std::move(table));
}

HandlerOutput run_memory_sim(const ScenarioFile& sc, const RunContext& ctx) {
  HandlerOutput out;
  const json& doc = sc.doc;
  if (!doc.contains("memory")) throw ScenarioError("memory-sim runs need a \"memory\" section");
  const json& m = doc["memory"];
  const std::string protocol =
      m.contains("protocol") && m["protocol"].is_string() ? m["protocol"].get<std::string>()
                                                          : "swap";
  const auto resonator = maybe_resonator(doc);

  if (protocol == "echo") {
    const json& e = m.contains("echo") ? m["echo"] : m;
    const double g0 = k::angular(require(e, "g0_hz", "memory.echo"));
    double kappa = 0.0;
    if (e.contains("kappa_hz"))
      kappa = k::angular(require(e, "kappa_hz", "memory.echo"));
    else if (resonator)
      kappa = resonator->kappa();
    else
      throw ScenarioError("memory.echo: needs \"kappa_hz\" or a resonator section");
    const double t2_star = require(e, "t2_star_s", "memory.echo");
    const double n_spins = require(e, "n_spins", "memory.echo");
    EchoOptions opts;
    opts.n_sim = static_cast<std::size_t>(get_or(e, "n_sim", double(opts.n_sim)));
    const EchoReport rep = echo_photon_count(g0, kappa, 1.0 / t2_star, n_spins, opts);
    out.results["protocol"] = "echo";
    out.results["simulated_photons"] = rep.simulated_photons;
    out.results["analytic_photons"] = rep.analytic_photons;
    out.results["cooperativity"] = rep.cooperativity;
    out.results["simulated_over_analytic"] =
        rep.analytic_photons > 0.0 ? rep.simulated_photons / rep.analytic_photons : 0.0;
    out.assumptions.push_back(
        "echo modeled as an in-phase collective state dephasing across a Lorentzian profile");
    return out;
  }

  // Shared setup for the dynamical protocols.
  double kappa = 0.0;
  if (m.contains("kappa_hz"))
    kappa = k::angular(require(m, "kappa_hz", "memory"));
  else if (resonator)
    kappa = resonator->kappa();
  else
    out.assumptions.push_back("no cavity loss given; the cavity is lossless");
  double gamma2 = 0.0;
  if (m.contains("t2_s"))
    gamma2 = 1.0 / require(m, "t2_s", "memory");
  else if (doc.contains("lifetimes"))
    gamma2 = lifetimes_from(doc["lifetimes"]).gamma2;
  const double delta_c = k::angular(get_or(m, "delta_c_hz", 0.0));

  MemoryParams params;
  if (m.contains("g_ens_hz")) {
    const double g_ens = k::angular(require(m, "g_ens_hz", "memory"));
    const auto n = static_cast<std::size_t>(get_or(m, "n_spins", 1.0));
    if (n < 1) throw ScenarioError("memory: \"n_spins\" must be at least 1");
    params.spins.assign(n, SpinMember{g_ens / std::sqrt(double(n)), 0.0});
    params.kappa = kappa;
    params.gamma2 = gamma2;
    params.delta_c = delta_c;
  } else if (doc.contains("ensemble")) {
    const SpinEnsemble e = ensemble_from(doc["ensemble"], resonator ? &*resonator : nullptr,
                                         resolve_seed(sc, ctx));
    const auto n = static_cast<std::size_t>(get_or(m, "n_spins", double(e.members().size())));
    params = MemoryParams::from_ensemble(e, n, kappa, gamma2, delta_c);
    if (e.members().size() == 1 && n == 1)
      out.assumptions.push_back("uniform ensemble simulated as one collective macro-spin");
  } else {
    throw ScenarioError("memory-sim needs an \"ensemble\" section or memory.g_ens_hz");
  }

  const std::size_t n_spins = params.spins.size();
  out.results["protocol"] = protocol;
  out.results["n_spins"] = n_spins;
  out.results["g_ens_hz"] = k::cycles(params.g_ens());
  out.results["kappa_hz"] = k::cycles(params.kappa);
  out.results["gamma2_per_s"] = params.gamma2;

  const auto start = MemoryState::photon_in_cavity(n_spins);

  if (protocol == "trace") {
    const double duration = require(m, "duration_s", "memory");
    const EvolveRecord rec = evolve_recorded(start, params, duration, 0.0, 2000);
    out.results["duration_s"] = duration;
    out.results["emitted_flux"] = rec.emitted_flux;
    out.results["final_norm_sq"] = rec.state.norm_sq();
    out.results["final_a"] = cplx(rec.state.a);
    append_trace(out, rec.trace);
    return out;
  }

  if (protocol == "swap") {
    const SwapResult sw = swap(start, params);
    const ModeVector bright = bright_mode(params);
    const double stored = sw.state.s.squaredNorm();
    out.results["t_swap_s"] = sw.t_swap;
    out.results["residual_fraction"] = sw.residual_fraction;
    out.results["stored_fraction"] = stored;
    out.results["bright_mode_weight"] =
        stored > 0.0 ? std::norm(bright.overlap(sw.state)) / stored : 0.0;
    const EvolveRecord rec = evolve_recorded(start, params, sw.t_swap, 0.0, 1200);
    append_trace(out, rec.trace);
    return out;
  }

  if (protocol == "store-retrieve") {
    const SwapResult sw = swap(start, params);
    MemoryState held = sw.state;
    const double hold = get_or(m, "hold_s", 0.0);
    if (hold > 0.0) held = evolve(held, params, hold);
    const RetrievalResult ret = retrieve(held, params, {}, get_or(m, "retrieve_s", 0.0));
    out.results["t_swap_s"] = sw.t_swap;
    out.results["hold_s"] = hold;
    out.results["retrieve_duration_s"] = ret.duration;
    out.results["efficiency"] = ret.efficiency;
    out.results["final_norm_sq"] = ret.state.norm_sq();
    append_trace(out, ret.trace);
    return out;
  }

  if (protocol == "multimode") {
    if (!m.contains("qubits") || !m["qubits"].is_array() || m["qubits"].empty())
      throw ScenarioError("memory: multimode needs a non-empty \"qubits\" array of [re, im] pairs");
    Eigen::VectorXcd inputs(static_cast<Eigen::Index>(m["qubits"].size()));
    Eigen::Index i = 0;
    for (const auto& q : m["qubits"])
      inputs[i++] = std::complex<double>(q.at(0).get<double>(), q.at(1).get<double>());
    const MultimodeReport rep = multimode_store_retrieve(inputs, params);
    out.results["qubits"] = m["qubits"];
    out.results["t_swap_s"] = rep.t_swap;
    out.results["fidelities"] = rep.fidelities;
    out.results["max_crosstalk"] = rep.max_crosstalk;
    json retrieved = json::array();
    for (Eigen::Index j = 0; j < rep.retrieved.size(); ++j)
      retrieved.push_back(cplx(rep.retrieved[j]));
    out.results["retrieved"] = std::move(retrieved);
    json transfer = json::array();
    for (Eigen::Index row = 0; row < rep.transfer.rows(); ++row) {
      json r_ = json::array();
      for (Eigen::Index col = 0; col < rep.transfer.cols(); ++col)
        r_.push_back(cplx(rep.transfer(row, col)));
      transfer.push_back(std::move(r_));
    }
    out.results["transfer"] = std::move(transfer);
    out.assumptions.push_back(
        "round-trip amplitudes carry the deterministic -1 of two half-cycle swaps");
    return out;
  }

  throw ScenarioError("memory: unknown protocol \"" + protocol + "\"");
}

HandlerOutput run_sensitivity(const ScenarioFile& sc, const RunContext&) {
  HandlerOutput out;
  const SensitivityInputs in = sensitivity_inputs_from(sc.doc);
  const SensitivityReport rep = full_report(in);

  out.results["c0"] = rep.c0;
  out.results["noise_photons"] = rep.noise_photons;
  out.results["kappa_hz"] = k::cycles(rep.kappa);
  out.results["purcell_rate_per_s"] = rep.purcell_rate;
  out.results["repetition_hz"] = rep.repetition_hz;
  out.results["n_min"] = rep.n_min;
  out.results["n_min_per_rt_hz"] = rep.n_min_per_rt_hz;
  out.results["detectable"] = rep.detectable;
  out.results["polarization"] = in.polarization;
  if (in.n_spins > 0.0) {
    out.results["n_spins"] = in.n_spins;
    out.results["snr"] = rep.snr;
    out.results["echo_photons"] = rep.echo_photons;
  }
  out.results["anchors"] = {
      {"demonstrated_min_spins", reference::demonstrated_min_spins},
      {"demonstrated_repetition_hz", reference::demonstrated_repetition_hz},
      {"inferred_sensitivity_per_rt_hz", reference::inferred_sensitivity_per_rt_hz},
      {"n_min_over_demonstrated", rep.n_min / reference::demonstrated_min_spins},
      {"sensitivity_over_inferred",
       rep.n_min_per_rt_hz / reference::inferred_sensitivity_per_rt_hz}};
  json prov = json::object();
  for (const auto& [key, value] : rep.provenance) prov[key] = value;
  out.results["provenance"] = std::move(prov);

  for (const auto& [key, value] : rep.provenance)
    if (value == "assumed") out.assumptions.push_back(key + " is an assumed operating value");
  if (!sc.doc["sensitivity"].contains("polarization"))
    out.assumptions.push_back("polarization derived from the thermal Boltzmann factor");
  out.assumptions.push_back(
      "ideal-limit estimate; demonstrated hardware includes losses this model excludes");

  NamedTable table;
  table.name = "";
  table.columns = {"c0[1]",          "noise[photons]",      "purcell_rate[1/s]",
                   "repetition[Hz]", "n_min[spins]",        "sensitivity[spins/sqrt(Hz)]"};
  table.rows.push_back({rep.c0, rep.noise_photons, rep.purcell_rate, rep.repetition_hz,
                        rep.n_min, rep.n_min_per_rt_hz});
  out.tables.push_back(std::move(table));
  return out;
}

// ------------------------------------------------------------------- sweep

std::string sweep_unit(const std::string& pointer) {
  auto ends_with = [&](const char* suffix) {
    const std::string s = suffix;
    return pointer.size() >= s.size() && pointer.compare(pointer.size() - s.size(), s.size(), s) == 0;
  };
  if (ends_with("_hz")) return "Hz";
  if (ends_with("_hz_per_t")) return "Hz/T";
  if (ends_with("_s")) return "s";
  if (ends_with("_t")) return "T";
  if (ends_with("_k")) return "K";
  if (ends_with("_w")) return "W";
  if (ends_with("_m3")) return "m^3";
  if (ends_with("_m")) return "m";
  return "1";
}

void flatten_numeric(const json& v, const std::string& prefix,
                     std::vector<std::pair<std::string, double>>& out) {
  if (v.is_number()) {
    out.emplace_back(prefix, v.get<double>());
  } else if (v.is_boolean()) {
    out.emplace_back(prefix, v.get<bool>() ? 1.0 : 0.0);
  } else if (v.is_object()) {
    for (const auto& [key, value] : v.items())
      flatten_numeric(value, prefix.empty() ? key : prefix + "." + key, out);
  } else if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i)
      flatten_numeric(v[i], prefix + "[" + std::to_string(i) + "]", out);
  }
}

HandlerOutput run_sweep(const ScenarioFile& sc, const RunContext& ctx) {
  const json& doc = sc.doc;
  if (!doc.contains("sweep")) throw ScenarioError("sweep runs need a \"sweep\" section");
  const json& s = doc["sweep"];
  const std::string pointer = s.at("parameter").get<std::string>();
  const std::string sub = s.at("subcommand").get<std::string>();
  if (sub == "sweep") throw ScenarioError("sweep: sweeps do not nest");
  const double lo = require(s, "min", "sweep");
  const double hi = require(s, "max", "sweep");
  const auto points = static_cast<std::size_t>(require(s, "points", "sweep"));
  const std::string scale =
      s.contains("scale") && s["scale"].is_string() ? s["scale"].get<std::string>() : "linear";
  if (points < 1) throw ScenarioError("sweep: \"points\" must be at least 1");
  if (scale == "log" && !(lo > 0.0 && hi > 0.0))
    throw ScenarioError("sweep: log scale needs positive bounds");

  std::vector<double> values(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double f = points > 1 ? double(i) / double(points - 1) : 0.0;
    values[i] = scale == "log" ? lo * std::pow(hi / lo, f) : lo + (hi - lo) * f;
  }

  const json::json_pointer jp(pointer);
  if (!doc.contains(jp))
    throw ScenarioError("sweep: parameter " + pointer + " does not exist in this scenario");

  std::vector<json> run_results(points);
  std::vector<std::exception_ptr> failures(points);
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  const auto n_threads =
      std::min<std::size_t>(points, ctx.threads > 0 ? std::size_t(ctx.threads) : hw);

  auto worker = [&](std::size_t first) {
    for (std::size_t i = first; i < points; i += n_threads) {
      try {
        ScenarioFile variant;
        variant.path = sc.path;
        variant.text = sc.text;
        variant.doc = doc;
        variant.doc[jp] = values[i];
        variant.doc.erase("sweep");  // the inner run must not recurse
        run_results[i] = dispatch(sub, variant, ctx).results;
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };

  if (n_threads <= 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker, t);
    for (auto& t : pool) t.join();
  }
  for (std::size_t i = 0; i < points; ++i)
    if (failures[i]) std::rethrow_exception(failures[i]);  // lowest index wins

  HandlerOutput out;
  out.results["parameter"] = pointer;
  out.results["subcommand"] = sub;
  out.results["scale"] = scale;
  out.results["values"] = values;
  json runs = json::array();
  for (std::size_t i = 0; i < points; ++i)
    runs.push_back(json{{"value", values[i]}, {"results", run_results[i]}});
  out.results["runs"] = std::move(runs);

  // Merged CSV: the swept parameter first, then every numeric leaf. Column
  // set is the ordered union over runs; gaps are NaN.
  std::string pname = pointer.substr(1);
  std::replace(pname.begin(), pname.end(), '/', '.');
  NamedTable table;
  table.name = "";
  table.columns = {pname + "[" + sweep_unit(pointer) + "]"};
  std::map<std::string, std::size_t> col_index;
  std::vector<std::vector<std::pair<std::string, double>>> flat(points);
  for (std::size_t i = 0; i < points; ++i) {
    flatten_numeric(run_results[i], "", flat[i]);
    for (const auto& [name, value] : flat[i]) {
      (void)value;
      if (!col_index.count(name)) {
        col_index[name] = table.columns.size();
        table.columns.push_back(name);
      }
    }
  }
  for (std::size_t i = 0; i < points; ++i) {
    std::vector<double> row(table.columns.size(), std::numeric_limits<double>::quiet_NaN());
    row[0] = values[i];
    for (const auto& [name, value] : flat[i]) row[col_index[name]] = value;
    table.rows.push_back(std::move(row));
  }
  out.tables.push_back(std::move(table));
  return out;
}

HandlerOutput dispatch(const std::string& subcommand, const ScenarioFile& sc,
                       const RunContext& ctx) {
  if (subcommand == "spectrum") return run_spectrum(sc, ctx);
  if (subcommand == "clock-find") return run_clock_find(sc, ctx);
  if (subcommand == "coupling") return run_coupling(sc, ctx);
  if (subcommand == "purcell") return run_purcell(sc, ctx);
  if (subcommand == "regime") return run_regime(sc, ctx);
  if (subcommand == "memory-sim") return run_memory_sim(sc, ctx);
  if (subcommand == "sensitivity") return run_sensitivity(sc, ctx);
  if (subcommand == "sweep") return run_sweep(sc, ctx);
  throw ScenarioError("unknown subcommand \"" + subcommand + "\"");
}

void write_table_csv(const std::string& path, const NamedTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ScenarioError("cannot write " + path);
  for (std::size_t c = 0; c < table.columns.size(); ++c)
    out << (c ? "," : "") << table.columns[c];
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << fmt17(row[c]);
    out << "\n";
  }
}

/// Preset bookkeeping: surface each preset's assumed values in the report.
void preset_assumptions(const json& doc, std::vector<std::string>& assumptions) {
  for (const char* key : {"spin_system", "resonator", "sensitivity"}) {
    if (!doc.contains(key) || !doc[key].is_object()) continue;
    const json& node = doc[key];
    if (!node.contains("_preset") || !node.contains("_assumed")) continue;
    std::string line = std::string(key) + " preset \"" + node["_preset"].get<std::string>() +
                       "\" supplies assumed values:";
    for (const auto& name : node["_assumed"]) line += " " + name.get<std::string>();
    assumptions.push_back(std::move(line));
  }
}

}  // namespace

const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> names = {"spectrum",  "clock-find", "coupling",
                                                 "purcell",   "regime",     "memory-sim",
                                                 "sensitivity", "sweep"};
  return names;
}

RunArtifacts run_scenario(const std::string& subcommand, const ScenarioFile& sc,
                          const RunOptions& options) {
  const auto& names = subcommand_names();
  if (std::find(names.begin(), names.end(), subcommand) == names.end())
    throw ScenarioError("unknown subcommand \"" + subcommand + "\"");

  RunContext ctx;
  ctx.seed = options.seed;
  ctx.threads = options.threads;
  const auto seed = resolve_seed(sc, ctx);
  ctx.seed = seed;

  HandlerOutput handled = dispatch(subcommand, sc, ctx);
  preset_assumptions(sc.doc, handled.assumptions);

  json report;
  report["tool"] = "spinres";
  report["version"] = version;
  report["subcommand"] = subcommand;
  report["timestamp_utc"] = utc_now();
  if (seed) report["seed"] = *seed;
  report["inputs"] = sc.doc;
  report["results"] = handled.results;
  json notes = json::array();
  for (std::size_t i = 0; i < handled.assumptions.size(); ++i) {
    const auto& a = handled.assumptions[i];
    if (std::find(handled.assumptions.begin(), handled.assumptions.begin() + long(i), a) ==
        handled.assumptions.begin() + long(i))
      notes.push_back(a);
  }
  report["assumptions"] = std::move(notes);
  report = sanitize(report);

  RunArtifacts artifacts;
  artifacts.report = report;

  const std::string out_dir = options.out_dir.empty() ? "." : options.out_dir;
  std::string stem = subcommand;
  if (sc.doc.contains("output") && sc.doc["output"].is_object() &&
      sc.doc["output"].contains("stem") && sc.doc["output"]["stem"].is_string())
    stem = sc.doc["output"]["stem"].get<std::string>();

  if (options.write_json || options.write_csv)
    std::filesystem::create_directories(out_dir);

  if (options.write_json) {
    const std::string path = out_dir + "/" + stem + ".json";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ScenarioError("cannot write " + path);
    out << report.dump(2) << "\n";
    artifacts.files.push_back(path);
  }
  if (options.write_csv) {
    for (const auto& table : handled.tables) {
      const std::string path =
          out_dir + "/" + stem + (table.name.empty() ? "" : "_" + table.name) + ".csv";
      write_table_csv(path, table);
      artifacts.files.push_back(path);
    }
  }
  return artifacts;
}

}  // namespace spinres
