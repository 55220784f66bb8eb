#include "spinres/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "spinres/constants.hpp"
#include "spinres/errors.hpp"

namespace spinres {

namespace {

// Line/column (1-based) of a byte offset in text.
std::pair<int, int> line_col(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  int line = 1, col = 1;
  for (std::size_t i = 0; i < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

std::vector<std::string> pointer_tokens(const std::string& pointer) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < pointer.size()) {
    if (pointer[i] == '/') ++i;
    std::string tok;
    while (i < pointer.size() && pointer[i] != '/') {
      if (pointer[i] == '~' && i + 1 < pointer.size()) {
        tok += pointer[i + 1] == '1' ? '/' : '~';
        i += 2;
      } else {
        tok += pointer[i++];
      }
    }
    if (!tok.empty()) tokens.push_back(tok);
  }
  return tokens;
}

bool is_index(const std::string& tok) {
  return !tok.empty() && tok.find_first_not_of("0123456789") == std::string::npos;
}

json spin_system_presets() {
  json p;
  p["free-electron"] = {{"electron_spin", 0.5}, {"nuclear_spin", 0.0},
                        {"g_e", constants::g_electron}, {"g_n", 0.0},
                        {"hyperfine_hz", 0.0}, {"label", "free electron"}};
  p["P:Si-like"] = {{"electron_spin", 0.5}, {"nuclear_spin", 0.5},
                    {"g_e", 1.9985}, {"g_n", 2.2632},
                    {"hyperfine_hz", 117.53e6}, {"label", "phosphorus donor in silicon"},
                    {"_assumed", json::array({"g_e", "g_n", "hyperfine_hz"})}};
  p["Bi:Si-like"] = {{"electron_spin", 0.5}, {"nuclear_spin", 4.5},
                     {"g_e", 2.0003}, {"g_n", 0.9135},
                     {"hyperfine_hz", 1.4754e9}, {"label", "bismuth donor in silicon"},
                     {"_assumed", json::array({"g_e", "g_n", "hyperfine_hz"})}};
  return p;
}

json resonator_presets() {
  json p;
  p["3D-cavity-Xband"] = {{"frequency_hz", 1.0e10}, {"quality", 1.0e5},
                          {"impedance_ohm", 50.0}, {"mode_volume_m3", 1.0e-12},
                          {"label", "X-band 3D cavity"},
                          {"_assumed", json::array({"impedance_ohm", "mode_volume_m3"})}};
  p["planar-LC-probst-like"] = {
      {"frequency_hz", 7.3e9}, {"quality", 4.0e4}, {"impedance_ohm", 50.0},
      {"wire", {{"point_m", json::array({0.0, 0.0, 0.0})},
                {"direction", json::array({0.0, 1.0, 0.0})}}},
      {"label", "planar LC micro-resonator"},
      {"_assumed", json::array({"impedance_ohm", "quality"})}};
  return p;
}

json sensitivity_presets() {
  json p;
  p["planar-LC-probst-like"] = {
      {"g0_hz", 450.0},        {"frequency_hz", 7.3e9},
      {"quality", 4.0e4},      {"t2_star_s", 5.0e-6},
      {"temperature_k", 0.02}, {"added_photons", 0.0},
      {"duty_cycle_factor", 1.0 / 3.0},
      {"n_spins", 230.0},
      {"_assumed",
       json::array({"frequency_hz", "quality", "temperature_k", "duty_cycle_factor"})}};
  return p;
}

void expand_presets(json& doc) {
  const auto& lib = preset_library();
  for (const char* key : {"spin_system", "resonator"}) {
    if (!doc.contains(key) || !doc[key].is_string()) continue;
    const std::string name = doc[key].get<std::string>();
    const auto& table = lib.at(key == std::string("spin_system") ? "spin_systems" : "resonators");
    if (table.contains(name)) {
      json expanded = table.at(name);
      expanded["_preset"] = name;
      doc[key] = expanded;
    }
  }
  if (doc.contains("sensitivity")) {
    auto& node = doc["sensitivity"];
    std::string name;
    if (node.is_string()) {
      name = node.get<std::string>();
      node = json::object();
    } else if (node.is_object() && node.contains("preset") && node["preset"].is_string()) {
      name = node["preset"].get<std::string>();
    }
    if (!name.empty() && lib.at("sensitivity").contains(name)) {
      for (const auto& [k, v] : lib.at("sensitivity").at(name).items())
        if (!node.contains(k)) node[k] = v;
      node["_preset"] = name;
      node.erase("preset");
    }
  }
}

// Extraction helpers: every failure names the key it concerns.
double require_number(const json& node, const char* key, const std::string& where) {
  if (!node.contains(key))
    throw ScenarioError(where + ": missing required key \"" + key + "\"");
  if (!node[key].is_number())
    throw ScenarioError(where + ": \"" + key + "\" must be a number");
  return node[key].get<double>();
}

double number_or(const json& node, const char* key, double fallback) {
  if (!node.contains(key)) return fallback;
  if (!node[key].is_number())
    throw ScenarioError(std::string("\"") + key + "\" must be a number");
  return node[key].get<double>();
}

Eigen::Vector3d vec3(const json& node, const char* key, const std::string& where) {
  if (!node.contains(key) || !node[key].is_array() || node[key].size() != 3)
    throw ScenarioError(where + ": \"" + key + "\" must be an array of three numbers");
  Eigen::Vector3d v;
  for (int i = 0; i < 3; ++i) {
    if (!node[key][static_cast<std::size_t>(i)].is_number())
      throw ScenarioError(where + ": \"" + key + "\" must contain numbers only");
    v[i] = node[key][static_cast<std::size_t>(i)].get<double>();
  }
  return v;
}

}  // namespace

const json& preset_library() {
  static const json lib = [] {
    json l;
    l["spin_systems"] = spin_system_presets();
    l["resonators"] = resonator_presets();
    l["sensitivity"] = sensitivity_presets();
    return l;
  }();
  return lib;
}

std::string format_diagnostic(const Diagnostic& d, const std::string& path) {
  std::ostringstream out;
  out << path;
  if (d.line > 0) out << ":" << d.line << ":" << d.column;
  out << ": " << d.message;
  if (!d.pointer.empty()) out << " (at " << d.pointer << ")";
  return out.str();
}

ScenarioFile parse_scenario(std::string text, std::string name) {
  ScenarioFile sc;
  sc.path = std::move(name);
  sc.text = std::move(text);
  try {
    sc.doc = json::parse(sc.text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, col] = line_col(sc.text, e.byte > 0 ? e.byte - 1 : 0);
    std::ostringstream msg;
    msg << sc.path << ":" << line << ":" << col << ": scenario is not valid JSON: " << e.what();
    throw ScenarioError(msg.str());
  }
  if (!sc.doc.is_object())
    throw ScenarioError(sc.path + ":1:1: scenario root must be a JSON object");
  expand_presets(sc.doc);
  return sc;
}

ScenarioFile load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("cannot read scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path);
}

Diagnostic locate_pointer(const ScenarioFile& sc, const std::string& pointer,
                          std::string message) {
  Diagnostic d;
  d.pointer = pointer;
  d.message = std::move(message);
  std::size_t pos = 0;
  bool found = false;
  for (const auto& tok : pointer_tokens(pointer)) {
    if (is_index(tok)) continue;  // array hops keep the parent anchor
    const auto hit = sc.text.find("\"" + tok + "\"", pos);
    if (hit == std::string::npos) break;
    pos = hit + 1;
    found = true;
  }
  if (found) {
    const auto [line, col] = line_col(sc.text, pos - 1);
    d.line = line;
    d.column = col;
  }
  return d;
}

SpinSystem spin_system_from(const json& node) {
  if (node.is_string())
    throw ScenarioError("unknown spin system preset \"" + node.get<std::string>() + "\"");
  if (!node.is_object()) throw ScenarioError("\"spin_system\" must be an object or preset name");
  SpinSystem sys;
  sys.electron_spin = require_number(node, "electron_spin", "spin_system");
  sys.nuclear_spin = number_or(node, "nuclear_spin", 0.0);
  sys.g_e = number_or(node, "g_e", constants::g_electron);
  sys.g_n = number_or(node, "g_n", 0.0);
  sys.hyperfine_hz = number_or(node, "hyperfine_hz", 0.0);
  if (node.contains("label") && node["label"].is_string())
    sys.label = node["label"].get<std::string>();
  sys.validate();
  return sys;
}

ResonatorModel resonator_from(const json& node) {
  if (node.is_string())
    throw ScenarioError("unknown resonator preset \"" + node.get<std::string>() + "\"");
  if (!node.is_object()) throw ScenarioError("\"resonator\" must be an object or preset name");
  ResonatorModel r;
  r.omega_c = constants::angular(require_number(node, "frequency_hz", "resonator"));
  r.quality = require_number(node, "quality", "resonator");
  r.impedance_ohm = number_or(node, "impedance_ohm", 50.0);
  if (node.contains("wire")) {
    const auto& w = node["wire"];
    WireGeometry wire;
    wire.point = vec3(w, "point_m", "resonator.wire");
    wire.direction = vec3(w, "direction", "resonator.wire");
    r.wire = wire;
  }
  if (node.contains("mode_volume_m3"))
    r.mode_volume_m3 = require_number(node, "mode_volume_m3", "resonator");
  if (node.contains("label") && node["label"].is_string())
    r.label = node["label"].get<std::string>();
  r.validate();
  return r;
}

SpinEnsemble ensemble_from(const json& node, const ResonatorModel* resonator,
                           std::optional<std::uint64_t> seed_override) {
  if (!node.is_object()) throw ScenarioError("\"ensemble\" must be an object");
  const std::string kind = node.contains("kind") && node["kind"].is_string()
                               ? node["kind"].get<std::string>()
                               : throw ScenarioError("ensemble: missing \"kind\"");

  SpinEnsemble e = [&] {
    if (kind == "uniform") {
      return SpinEnsemble::uniform(require_number(node, "total", "ensemble"),
                                   constants::angular(require_number(node, "g0_hz", "ensemble")),
                                   constants::angular(number_or(node, "delta_hz", 0.0)));
    }
    if (kind == "members") {
      if (!node.contains("members") || !node["members"].is_array() || node["members"].empty())
        throw ScenarioError("ensemble: \"members\" must be a non-empty array");
      std::vector<SpinMember> members;
      for (const auto& m : node["members"])
        members.push_back({constants::angular(require_number(m, "g_hz", "ensemble.members")),
                           constants::angular(number_or(m, "delta_hz", 0.0))});
      if (node.contains("represented_total"))
        return SpinEnsemble::from_members(std::move(members),
                                          require_number(node, "represented_total", "ensemble"));
      return SpinEnsemble::from_members(std::move(members));
    }
    if (kind == "sampled") {
      if (!resonator || !resonator->wire)
        throw ScenarioError("ensemble: sampling requires a resonator with wire geometry");
      EnsembleGenerator gen;
      gen.resonator = *resonator;
      if (node.contains("density_per_m3"))
        gen.density_per_m3 = require_number(node, "density_per_m3", "ensemble");
      else
        gen.density_per_m3 = 1e6 * require_number(node, "density_per_cm3", "ensemble");
      if (!node.contains("region_m") || !node["region_m"].is_object())
        throw ScenarioError("ensemble: sampling requires a \"region_m\" box");
      gen.region.lo = vec3(node["region_m"], "lo", "ensemble.region_m");
      gen.region.hi = vec3(node["region_m"], "hi", "ensemble.region_m");
      gen.g_factor = number_or(node, "g_factor", constants::g_electron);
      gen.matrix_element = number_or(node, "matrix_element", 0.5);
      gen.min_wire_distance_m = number_or(node, "min_wire_distance_m", 1e-8);
      const double count = require_number(node, "sample_count", "ensemble");
      if (!(count >= 1.0)) throw ScenarioError("ensemble: \"sample_count\" must be at least 1");
      gen.sample_count = static_cast<std::size_t>(count);
      if (node.contains("detuning")) {
        const auto& d = node["detuning"];
        const std::string shape = d.contains("shape") && d["shape"].is_string()
                                      ? d["shape"].get<std::string>()
                                      : "none";
        if (shape == "gaussian")
          gen.detuning.shape = DetuningSpec::Shape::gaussian;
        else if (shape == "lorentzian")
          gen.detuning.shape = DetuningSpec::Shape::lorentzian;
        else if (shape != "none")
          throw ScenarioError("ensemble.detuning: unknown shape \"" + shape + "\"");
        gen.detuning.fwhm_hz = number_or(d, "fwhm_hz", 0.0);
      }
      if (seed_override)
        gen.seed = *seed_override;
      else if (node.contains("seed"))
        gen.seed = node["seed"].get<std::uint64_t>();
      else
        throw ScenarioError("ensemble: sampling requires a seed (ensemble.seed, top-level seed, or --seed)");
      return SpinEnsemble::sampled(gen);
    }
    throw ScenarioError("ensemble: unknown kind \"" + kind + "\"");
  }();

  if (node.contains("polarization")) {
    const double p = require_number(node, "polarization", "ensemble");
    if (p < 0.0 || p > 1.0) throw ScenarioError("ensemble: polarization must lie in [0, 1]");
    e.polarization = p;
  }
  return e;
}

SpinLifetimes lifetimes_from(const json& node) {
  if (!node.is_object()) throw ScenarioError("\"lifetimes\" must be an object");
  return SpinLifetimes::from_times(require_number(node, "t1_s", "lifetimes"),
                                   require_number(node, "t2_s", "lifetimes"),
                                   require_number(node, "t2_star_s", "lifetimes"));
}

NoiseModel noise_from(const json& node, double omega0) {
  if (!node.is_object()) throw ScenarioError("\"noise\" must be an object");
  NoiseModel n;
  n.temperature_k = require_number(node, "temperature_k", "noise");
  n.amplifier_added_photons = number_or(node, "added_photons", 0.0);
  n.omega0 = omega0;
  return n;
}

SensitivityInputs sensitivity_inputs_from(const json& root) {
  if (!root.contains("sensitivity"))
    throw ScenarioError("this run needs a \"sensitivity\" section (or preset)");
  const json& node = root["sensitivity"];
  if (!node.is_object()) throw ScenarioError("\"sensitivity\" must be an object or preset name");

  SensitivityInputs in;
  in.g0 = constants::angular(require_number(node, "g0_hz", "sensitivity"));
  in.omega0 = constants::angular(require_number(node, "frequency_hz", "sensitivity"));
  in.quality = require_number(node, "quality", "sensitivity");
  const double t2_star = require_number(node, "t2_star_s", "sensitivity");
  if (!(t2_star > 0.0)) throw ScenarioError("sensitivity: \"t2_star_s\" must be positive");
  in.gamma2_star = 1.0 / t2_star;
  in.duty_cycle_factor = number_or(node, "duty_cycle_factor", 1.0 / 3.0);
  in.n_spins = number_or(node, "n_spins", 0.0);
  in.noise = NoiseModel{number_or(node, "temperature_k", 0.0), in.omega0,
                        number_or(node, "added_photons", 0.0)};
  if (node.contains("polarization"))
    in.polarization = require_number(node, "polarization", "sensitivity");
  else
    in.polarization =
        thermal_polarization(in.noise.temperature_k, in.omega0 / (2.0 * constants::pi));
  return in;
}

namespace {

// Fallible check helper: run a builder, convert its exception into a
// diagnostic anchored at `pointer`.
template <typename F>
void check(std::vector<Diagnostic>& out, const ScenarioFile& sc, const std::string& pointer,
           F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    out.push_back(locate_pointer(sc, pointer, e.what()));
  }
}

const std::vector<std::string>& known_top_level_keys() {
  static const std::vector<std::string> keys = {
      "spin_system", "resonator", "ensemble",    "lifetimes", "noise",
      "field_t",     "field_range_t", "clock",   "coupling",  "purcell",
      "memory",      "sensitivity",   "sweep",   "seed",      "output"};
  return keys;
}

const std::vector<std::string>& runnable_subcommands() {
  static const std::vector<std::string> cmds = {"spectrum", "clock-find", "coupling", "purcell",
                                                "regime",   "memory-sim", "sensitivity"};
  return cmds;
}

}  // namespace

std::vector<Diagnostic> validate_scenario(const ScenarioFile& sc) {
  std::vector<Diagnostic> out;
  const json& doc = sc.doc;

  for (const auto& [key, value] : doc.items()) {
    (void)value;
    if (key.empty() || key[0] == '_') continue;
    const auto& known = known_top_level_keys();
    if (std::find(known.begin(), known.end(), key) == known.end())
      out.push_back(locate_pointer(sc, "/" + key, "unknown top-level key \"" + key + "\""));
  }

  if (doc.contains("spin_system")) {
    check(out, sc, "/spin_system", [&] { (void)spin_system_from(doc["spin_system"]); });
  }

  const bool has_resonator = doc.contains("resonator");
  ResonatorModel resonator;
  bool resonator_ok = false;
  if (has_resonator) {
    check(out, sc, "/resonator", [&] {
      resonator = resonator_from(doc["resonator"]);
      resonator_ok = true;
    });
    if (resonator_ok && resonator.omega_c < constants::angular(1e3))
      out.push_back(locate_pointer(sc, "/resonator/frequency_hz",
                                   "resonator frequency below 1 kHz; the field is in Hz"));
  }

  if (doc.contains("ensemble")) {
    check(out, sc, "/ensemble", [&] {
      (void)ensemble_from(doc["ensemble"], resonator_ok ? &resonator : nullptr,
                          doc.contains("seed")
                              ? std::optional<std::uint64_t>(doc["seed"].get<std::uint64_t>())
                              : std::nullopt);
    });
  }

  if (doc.contains("lifetimes"))
    check(out, sc, "/lifetimes", [&] { (void)lifetimes_from(doc["lifetimes"]); });

  if (doc.contains("noise"))
    check(out, sc, "/noise", [&] { (void)noise_from(doc["noise"], constants::angular(1e9)); });

  if (doc.contains("field_t")) {
    check(out, sc, "/field_t", [&] {
      if (!doc["field_t"].is_number()) throw ScenarioError("\"field_t\" must be a number");
      const double b = doc["field_t"].get<double>();
      if (!std::isfinite(b) || std::abs(b) > 100.0)
        throw ScenarioError("\"field_t\" outside the plausible range |B| <= 100 T; the field is in tesla");
    });
  }

  if (doc.contains("field_range_t")) {
    check(out, sc, "/field_range_t", [&] {
      const auto& r = doc["field_range_t"];
      const double lo = require_number(r, "min", "field_range_t");
      const double hi = require_number(r, "max", "field_range_t");
      const double points = number_or(r, "points", 201.0);
      if (!(hi > lo)) throw ScenarioError("field_range_t: \"max\" must exceed \"min\"");
      if (!(points >= 2.0)) throw ScenarioError("field_range_t: \"points\" must be at least 2");
      if (std::abs(lo) > 100.0 || std::abs(hi) > 100.0)
        throw ScenarioError("field_range_t outside |B| <= 100 T; the fields are in tesla");
    });
  }

  if (doc.contains("clock")) {
    check(out, sc, "/clock", [&] {
      const auto& c = doc["clock"];
      if (number_or(c, "tolerance_hz_per_t", 1e3) <= 0.0)
        throw ScenarioError("clock: \"tolerance_hz_per_t\" must be positive");
      if (number_or(c, "grid_points", 400.0) < 3.0)
        throw ScenarioError("clock: \"grid_points\" must be at least 3");
      if (number_or(c, "min_matrix_element", 0.1) < 0.0)
        throw ScenarioError("clock: \"min_matrix_element\" must be non-negative");
      if (number_or(c, "merge_radius_t", 1e-3) < 0.0)
        throw ScenarioError("clock: \"merge_radius_t\" must be non-negative");
    });
  }

  if (doc.contains("coupling")) {
    check(out, sc, "/coupling", [&] {
      const auto& c = doc["coupling"];
      if (c.contains("position_m")) (void)vec3(c, "position_m", "coupling");
      if (c.contains("b0_direction") && vec3(c, "b0_direction", "coupling").norm() == 0.0)
        throw ScenarioError("coupling: \"b0_direction\" must not vanish");
      if (!has_resonator)
        throw ScenarioError("coupling runs need a \"resonator\" section");
    });
  }

  if (doc.contains("purcell")) {
    check(out, sc, "/purcell", [&] {
      const auto& p = doc["purcell"];
      if (number_or(p, "g0_hz", 0.0) < 0.0)
        throw ScenarioError("purcell: \"g0_hz\" must be non-negative");
      if (p.contains("pulse")) {
        const auto& pulse = p["pulse"];
        if (require_number(pulse, "t_ref_s", "purcell.pulse") <= 0.0 ||
            require_number(pulse, "t_p_s", "purcell.pulse") <= 0.0)
          throw ScenarioError("purcell.pulse: durations must be positive");
        if (require_number(pulse, "p_ref_w", "purcell.pulse") < 0.0)
          throw ScenarioError("purcell.pulse: reference power must be non-negative");
      }
      if (p.contains("moment_ratio") && require_number(p, "moment_ratio", "purcell") <= 0.0)
        throw ScenarioError("purcell: \"moment_ratio\" must be positive");
    });
  }

  if (doc.contains("memory")) {
    check(out, sc, "/memory", [&] {
      const auto& m = doc["memory"];
      const std::string protocol = m.contains("protocol") && m["protocol"].is_string()
                                       ? m["protocol"].get<std::string>()
                                       : "swap";
      static const std::vector<std::string> protocols = {"trace", "swap", "store-retrieve",
                                                         "multimode", "echo"};
      if (std::find(protocols.begin(), protocols.end(), protocol) == protocols.end())
        throw ScenarioError("memory: unknown protocol \"" + protocol + "\"");
      if (number_or(m, "kappa_hz", 0.0) < 0.0)
        throw ScenarioError("memory: \"kappa_hz\" must be non-negative");
      if (m.contains("t2_s") && require_number(m, "t2_s", "memory") <= 0.0)
        throw ScenarioError("memory: \"t2_s\" must be positive");
      if (protocol == "echo") {
        if (!m.contains("echo")) throw ScenarioError("memory: echo protocol needs an \"echo\" block");
        const auto& e = m["echo"];
        if (require_number(e, "t2_star_s", "memory.echo") <= 0.0)
          throw ScenarioError("memory.echo: \"t2_star_s\" must be positive");
        if (require_number(e, "n_spins", "memory.echo") < 1.0)
          throw ScenarioError("memory.echo: \"n_spins\" must be at least 1");
        if (require_number(e, "g0_hz", "memory.echo") < 0.0)
          throw ScenarioError("memory.echo: \"g0_hz\" must be non-negative");
        if (!e.contains("kappa_hz") && !has_resonator)
          throw ScenarioError("memory.echo: needs \"kappa_hz\" or a resonator section");
      } else {
        if (!doc.contains("ensemble") && !m.contains("g_ens_hz"))
          throw ScenarioError("memory: needs an \"ensemble\" section or \"g_ens_hz\"");
        if (number_or(m, "n_spins", 1.0) < 1.0)
          throw ScenarioError("memory: \"n_spins\" must be at least 1");
      }
      if (protocol == "multimode") {
        if (!m.contains("qubits") || !m["qubits"].is_array() || m["qubits"].empty())
          throw ScenarioError("memory: multimode needs a non-empty \"qubits\" array");
        for (const auto& q : m["qubits"])
          if (!q.is_array() || q.size() != 2 || !q[0].is_number() || !q[1].is_number())
            throw ScenarioError("memory: each qubit must be a [re, im] pair");
      }
      if (protocol == "trace" && require_number(m, "duration_s", "memory") <= 0.0)
        throw ScenarioError("memory: \"duration_s\" must be positive");
    });
  }

  if (doc.contains("sensitivity"))
    check(out, sc, "/sensitivity", [&] { (void)sensitivity_inputs_from(doc); });

  if (doc.contains("sweep")) {
    check(out, sc, "/sweep", [&] {
      const auto& s = doc["sweep"];
      if (!s.contains("parameter") || !s["parameter"].is_string())
        throw ScenarioError("sweep: missing \"parameter\" (a JSON pointer string)");
      const std::string pointer = s["parameter"].get<std::string>();
      if (pointer.empty() || pointer[0] != '/')
        throw ScenarioError("sweep: \"parameter\" must be an absolute JSON pointer like /sensitivity/g0_hz");
      if (!doc.contains(json::json_pointer(pointer)))
        throw ScenarioError("sweep: parameter " + pointer + " does not exist in this scenario");
      const double lo = require_number(s, "min", "sweep");
      const double hi = require_number(s, "max", "sweep");
      const double points = require_number(s, "points", "sweep");
      if (!(points >= 1.0)) throw ScenarioError("sweep: \"points\" must be at least 1");
      if (!(hi >= lo)) throw ScenarioError("sweep: \"max\" must not be below \"min\"");
      const std::string scale =
          s.contains("scale") && s["scale"].is_string() ? s["scale"].get<std::string>() : "linear";
      if (scale != "linear" && scale != "log")
        throw ScenarioError("sweep: \"scale\" must be \"linear\" or \"log\"");
      if (scale == "log" && !(lo > 0.0))
        throw ScenarioError("sweep: log scale needs a positive \"min\"");
      if (!s.contains("subcommand") || !s["subcommand"].is_string())
        throw ScenarioError("sweep: missing \"subcommand\"");
      const std::string sub = s["subcommand"].get<std::string>();
      const auto& cmds = runnable_subcommands();
      if (std::find(cmds.begin(), cmds.end(), sub) == cmds.end())
        throw ScenarioError("sweep: \"" + sub + "\" is not a sweepable subcommand");
    });
  }

  if (doc.contains("seed")) {
    check(out, sc, "/seed", [&] {
      if (!doc["seed"].is_number_unsigned())
        throw ScenarioError("\"seed\" must be a non-negative integer");
    });
  }

  if (doc.contains("output")) {
    check(out, sc, "/output", [&] {
      const auto& o = doc["output"];
      if (o.contains("stem")) {
        if (!o["stem"].is_string()) throw ScenarioError("output: \"stem\" must be a string");
        const std::string stem = o["stem"].get<std::string>();
        if (stem.empty() || stem.find('/') != std::string::npos ||
            stem.find('\\') != std::string::npos)
          throw ScenarioError("output: \"stem\" must be a bare file name");
      }
    });
  }

  return out;
}

}  // namespace spinres
