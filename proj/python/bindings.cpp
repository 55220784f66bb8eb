#include <pybind11/pybind11.h>
#include <pybind11/complex.h>
#include <pybind11/stl.h>

#include <array>

#include "spinres/constants.hpp"
#include "spinres/ensemble.hpp"
#include "spinres/errors.hpp"
#include "spinres/memory.hpp"
#include "spinres/resonator.hpp"
#include "spinres/runner.hpp"
#include "spinres/scenario.hpp"
#include "spinres/sensitivity.hpp"
#include "spinres/spin_system.hpp"
#include "spinres/version.hpp"

namespace py = pybind11;
using namespace spinres;

namespace {

using vec3 = std::array<double, 3>;

Eigen::Vector3d to_eigen(const vec3& a) { return {a[0], a[1], a[2]}; }
vec3 to_array(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }

std::vector<std::complex<double>> to_list(const Eigen::VectorXcd& v) {
  return {v.data(), v.data() + v.size()};
}

Eigen::VectorXcd to_eigen_vec(const std::vector<std::complex<double>>& v) {
  Eigen::VectorXcd out(static_cast<Eigen::Index>(v.size()));
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = v[static_cast<std::size_t>(i)];
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spin-ensemble microwave memory and pulsed magnetic-resonance design toolkit";
  m.attr("__version__") = version;

  // Domain exceptions map onto ValueError except where a dedicated type helps.
  py::register_exception<InvalidInputError>(m, "InvalidInputError", PyExc_ValueError);
  py::register_exception<ScenarioError>(m, "ScenarioError", PyExc_ValueError);
  py::register_exception<NoTransferError>(m, "NoTransferError", PyExc_RuntimeError);
  py::register_exception<UnreachableRegimeError>(m, "UnreachableRegimeError", PyExc_RuntimeError);
  py::register_exception<UndetectableError>(m, "UndetectableError", PyExc_RuntimeError);

  // ----------------------------------------------------------- spin systems
  py::class_<SpinSystem>(m, "SpinSystem")
      .def(py::init([](double electron_spin, double nuclear_spin, double g_e, double g_n,
                       double hyperfine_hz, const std::string& label) {
             SpinSystem s{electron_spin, nuclear_spin, g_e, g_n, hyperfine_hz, label};
             s.validate();
             return s;
           }),
           py::arg("electron_spin") = 0.5, py::arg("nuclear_spin") = 0.0,
           py::arg("g_e") = 2.00231930436256, py::arg("g_n") = 0.0,
           py::arg("hyperfine_hz") = 0.0, py::arg("label") = "")
      .def_readwrite("electron_spin", &SpinSystem::electron_spin)
      .def_readwrite("nuclear_spin", &SpinSystem::nuclear_spin)
      .def_readwrite("g_e", &SpinSystem::g_e)
      .def_readwrite("g_n", &SpinSystem::g_n)
      .def_readwrite("hyperfine_hz", &SpinSystem::hyperfine_hz)
      .def_readwrite("label", &SpinSystem::label)
      .def("dim", &SpinSystem::dim)
      .def("validate", &SpinSystem::validate);

  py::class_<Transition>(m, "Transition")
      .def_readonly("level_lo", &Transition::level_lo)
      .def_readonly("level_hi", &Transition::level_hi)
      .def_readonly("frequency_hz", &Transition::frequency_hz)
      .def_readonly("dfdb_hz_per_t", &Transition::dfdb_hz_per_t)
      .def_readonly("matrix_element", &Transition::matrix_element)
      .def_readonly("field_t", &Transition::field_t)
      .def("__repr__", [](const Transition& t) {
        return "Transition(" + std::to_string(t.level_lo) + "->" + std::to_string(t.level_hi) +
               ", " + std::to_string(t.frequency_hz) + " Hz)";
      });

  py::class_<ClockTransition>(m, "ClockTransition")
      .def_readonly("transition", &ClockTransition::transition)
      .def_readonly("field_t", &ClockTransition::field_t)
      .def_readonly("curvature_hz_per_t2", &ClockTransition::curvature_hz_per_t2)
      .def_readonly("components", &ClockTransition::components)
      .def("multiplicity", &ClockTransition::multiplicity);

  m.def("level_frequencies_hz",
        [](const SpinSystem& sys, double field_t) {
          const EigenSystem es = eigensystem_at(sys, field_t);
          std::vector<double> out(static_cast<std::size_t>(es.energies.size()));
          for (Eigen::Index i = 0; i < es.energies.size(); ++i)
            out[static_cast<std::size_t>(i)] = constants::cycles(es.energies[i]);
          return out;
        },
        py::arg("system"), py::arg("field_t"),
        "Eigenlevels at a static field, as frequencies in Hz, ascending.");
  m.def("transitions", &transitions, py::arg("system"), py::arg("field_t"),
        py::arg("min_matrix_element") = 0.1,
        "Allowed transitions at a field, strongest-element threshold applied.");
  m.def("transition_dfdb", &transition_dfdb, py::arg("system"), py::arg("transition"),
        py::arg("field_t"));
  m.def("find_clock_transitions",
        [](const SpinSystem& sys, double field_lo, double field_hi, int grid_points,
           double min_matrix_element, double tolerance_hz_per_t, double merge_radius_t) {
          ClockSearchOptions opts;
          opts.min_matrix_element = min_matrix_element;
          opts.tolerance_hz_per_t = tolerance_hz_per_t;
          opts.merge_radius_t = merge_radius_t;
          return find_clock_transitions(sys, field_lo, field_hi, grid_points, opts);
        },
        py::arg("system"), py::arg("field_lo"), py::arg("field_hi"),
        py::arg("grid_points") = 400, py::arg("min_matrix_element") = 0.1,
        py::arg("tolerance_hz_per_t") = 1e3, py::arg("merge_radius_t") = 1e-3,
        "Magnetic-field-insensitive (df/dB = 0) operating points in a field range.");

  // -------------------------------------------------------------- resonator
  py::class_<WireGeometry>(m, "WireGeometry")
      .def(py::init([](const vec3& point_m, const vec3& direction) {
             return WireGeometry{to_eigen(point_m), to_eigen(direction)};
           }),
           py::arg("point_m") = vec3{0.0, 0.0, 0.0}, py::arg("direction") = vec3{0.0, 1.0, 0.0})
      .def_property("point_m", [](const WireGeometry& w) { return to_array(w.point); },
                    [](WireGeometry& w, const vec3& p) { w.point = to_eigen(p); })
      .def_property("direction", [](const WireGeometry& w) { return to_array(w.direction); },
                    [](WireGeometry& w, const vec3& d) { w.direction = to_eigen(d); });

  py::class_<ResonatorModel>(m, "ResonatorModel")
      .def(py::init([](double frequency_hz, double quality, double impedance_ohm,
                       std::optional<WireGeometry> wire, std::optional<double> mode_volume_m3,
                       const std::string& label) {
             ResonatorModel r;
             r.omega_c = constants::angular(frequency_hz);
             r.quality = quality;
             r.impedance_ohm = impedance_ohm;
             r.wire = wire;
             r.mode_volume_m3 = mode_volume_m3;
             r.label = label;
             r.validate();
             return r;
           }),
           py::arg("frequency_hz"), py::arg("quality"), py::arg("impedance_ohm") = 50.0,
           py::arg("wire") = std::nullopt, py::arg("mode_volume_m3") = std::nullopt,
           py::arg("label") = "")
      .def_readwrite("omega_c", &ResonatorModel::omega_c)
      .def_readwrite("quality", &ResonatorModel::quality)
      .def_readwrite("impedance_ohm", &ResonatorModel::impedance_ohm)
      .def_readwrite("wire", &ResonatorModel::wire)
      .def_readwrite("mode_volume_m3", &ResonatorModel::mode_volume_m3)
      .def("kappa", &ResonatorModel::kappa)
      .def("inductance", &ResonatorModel::inductance)
      .def("wavelength_m", &ResonatorModel::wavelength_m);

  py::class_<CouplingResult>(m, "CouplingResult")
      .def_readonly("g0", &CouplingResult::g0)
      .def_readonly("zero_point_field_t", &CouplingResult::zero_point_field_t)
      .def_readonly("transition", &CouplingResult::transition);

  m.def("zero_point_current", &zero_point_current, py::arg("resonator"));
  m.def("field_at_point",
        [](const WireGeometry& wire, double current, const vec3& point) {
          return to_array(field_at_point(wire, current, to_eigen(point)));
        },
        py::arg("wire"), py::arg("current"), py::arg("point_m"));
  m.def("single_spin_coupling",
        [](const SpinSystem& sys, const Transition& t, const vec3& b0_direction,
           const vec3& delta_b) {
          return single_spin_coupling(sys, t, to_eigen(b0_direction), to_eigen(delta_b));
        },
        py::arg("system"), py::arg("transition"), py::arg("b0_direction"), py::arg("delta_b_t"));
  m.def("purcell_rate", &purcell_rate, py::arg("g0"), py::arg("kappa"), py::arg("delta") = 0.0);
  m.def("purcell_factor", &purcell_factor, py::arg("quality"), py::arg("wavelength_m"),
        py::arg("mode_volume_m3"));
  m.def("free_space_emission_rate", &free_space_emission_rate,
        py::arg("magnetic_moment_j_per_t"), py::arg("omega"));
  m.def("nuclear_purcell_scaling", &nuclear_purcell_scaling, py::arg("electron_rate"),
        py::arg("gyro_ratio"));
  m.def("pi_pulse_power", &pi_pulse_power, py::arg("t_p"), py::arg("t_ref"), py::arg("p_ref"));

  // ---------------------------------------------------------------- ensemble
  py::class_<SpinMember>(m, "SpinMember")
      .def(py::init([](double g, double delta) {
             return SpinMember{g, delta};
           }),
           py::arg("g"), py::arg("delta") = 0.0)
      .def_readwrite("g", &SpinMember::g)
      .def_readwrite("delta", &SpinMember::delta);

  py::class_<SpinEnsemble>(m, "SpinEnsemble")
      .def_static("uniform", &SpinEnsemble::uniform, py::arg("total"), py::arg("g0"),
                  py::arg("delta") = 0.0)
      .def_static("from_members",
                  py::overload_cast<std::vector<SpinMember>>(&SpinEnsemble::from_members),
                  py::arg("members"))
      .def_static("from_members",
                  py::overload_cast<std::vector<SpinMember>, double>(&SpinEnsemble::from_members),
                  py::arg("members"), py::arg("represented_total"))
      .def("total", &SpinEnsemble::total)
      .def("members", &SpinEnsemble::members)
      .def_readwrite("polarization", &SpinEnsemble::polarization);

  py::class_<SpinLifetimes>(m, "SpinLifetimes")
      .def_static("from_rates", &SpinLifetimes::from_rates, py::arg("gamma1"), py::arg("gamma2"),
                  py::arg("gamma2_star"))
      .def_static("from_times", &SpinLifetimes::from_times, py::arg("t1_s"), py::arg("t2_s"),
                  py::arg("t2_star_s"))
      .def_readonly("gamma1", &SpinLifetimes::gamma1)
      .def_readonly("gamma2", &SpinLifetimes::gamma2)
      .def_readonly("gamma2_star", &SpinLifetimes::gamma2_star);

  py::class_<RegimeReport>(m, "RegimeReport")
      .def_readonly("strong_coupling_ensemble", &RegimeReport::strong_coupling_ensemble)
      .def_readonly("high_cooperativity_ensemble", &RegimeReport::high_cooperativity_ensemble)
      .def_readonly("high_cooperativity_single", &RegimeReport::high_cooperativity_single)
      .def_readonly("purcell_dominated", &RegimeReport::purcell_dominated)
      .def_readonly("margin_strong_coupling", &RegimeReport::margin_strong_coupling)
      .def_readonly("margin_high_coop_ensemble", &RegimeReport::margin_high_coop_ensemble)
      .def_readonly("margin_high_coop_single", &RegimeReport::margin_high_coop_single)
      .def_readonly("margin_purcell", &RegimeReport::margin_purcell);

  m.def("ensemble_coupling", &ensemble_coupling, py::arg("ensemble"),
        "Collective coupling sqrt(N) x rms single-spin coupling, in rad/s.");
  m.def("thermal_polarization", &thermal_polarization, py::arg("temperature_k"),
        py::arg("frequency_hz"));
  m.def("classify_regime", &classify_regime, py::arg("g_ens"), py::arg("g0"), py::arg("kappa"),
        py::arg("rates"));
  m.def("min_q_for_strong_coupling", &min_q_for_strong_coupling, py::arg("omega_c"),
        py::arg("g_ens"), py::arg("gamma2_star"));

  // ------------------------------------------------------------------ memory
  py::class_<MemoryState>(m, "MemoryState")
      .def(py::init<>())
      .def_static("photon_in_cavity", &MemoryState::photon_in_cavity, py::arg("n_spins"),
                  py::arg("amplitude") = std::complex<double>{1.0, 0.0})
      .def_readwrite("a", &MemoryState::a)
      .def_property("s", [](const MemoryState& st) { return to_list(st.s); },
                    [](MemoryState& st, const std::vector<std::complex<double>>& v) {
                      st.s = to_eigen_vec(v);
                    })
      .def_readwrite("time", &MemoryState::time)
      .def("norm_sq", &MemoryState::norm_sq);

  py::class_<MemoryParams>(m, "MemoryParams")
      .def(py::init([](std::vector<SpinMember> spins, double kappa, double gamma2,
                       double delta_c) {
             MemoryParams p;
             p.spins = std::move(spins);
             p.kappa = kappa;
             p.gamma2 = gamma2;
             p.delta_c = delta_c;
             return p;
           }),
           py::arg("spins") = std::vector<SpinMember>{}, py::arg("kappa") = 0.0,
           py::arg("gamma2") = 0.0, py::arg("delta_c") = 0.0)
      .def_static("from_ensemble", &MemoryParams::from_ensemble, py::arg("ensemble"),
                  py::arg("n_spins"), py::arg("kappa") = 0.0, py::arg("gamma2") = 0.0,
                  py::arg("delta_c") = 0.0)
      .def_readwrite("spins", &MemoryParams::spins)
      .def_readwrite("kappa", &MemoryParams::kappa)
      .def_readwrite("gamma2", &MemoryParams::gamma2)
      .def_readwrite("delta_c", &MemoryParams::delta_c)
      .def("g_ens", &MemoryParams::g_ens)
      .def("default_dt", &MemoryParams::default_dt);

  py::class_<TracePoint>(m, "TracePoint")
      .def_readonly("time", &TracePoint::time)
      .def_readonly("a", &TracePoint::a)
      .def_readonly("stored_norm_sq", &TracePoint::stored_norm_sq)
      .def_readonly("flux_rate", &TracePoint::flux_rate);

  py::class_<EvolveRecord>(m, "EvolveRecord")
      .def_readonly("state", &EvolveRecord::state)
      .def_readonly("emitted_flux", &EvolveRecord::emitted_flux)
      .def_readonly("trace", &EvolveRecord::trace);

  py::class_<SwapResult>(m, "SwapResult")
      .def_readonly("state", &SwapResult::state)
      .def_readonly("t_swap", &SwapResult::t_swap)
      .def_readonly("residual_fraction", &SwapResult::residual_fraction);

  py::class_<RetrievalResult>(m, "RetrievalResult")
      .def_readonly("state", &RetrievalResult::state)
      .def_readonly("efficiency", &RetrievalResult::efficiency)
      .def_readonly("duration", &RetrievalResult::duration)
      .def_readonly("trace", &RetrievalResult::trace);

  py::class_<MultimodeReport>(m, "MultimodeReport")
      .def_property_readonly("transfer",
                             [](const MultimodeReport& r) {
                               std::vector<std::vector<std::complex<double>>> out;
                               for (Eigen::Index i = 0; i < r.transfer.rows(); ++i)
                                 out.push_back(to_list(r.transfer.row(i).transpose()));
                               return out;
                             })
      .def_readonly("fidelities", &MultimodeReport::fidelities)
      .def_readonly("max_crosstalk", &MultimodeReport::max_crosstalk)
      .def_property_readonly("retrieved",
                             [](const MultimodeReport& r) { return to_list(r.retrieved); })
      .def_readonly("t_swap", &MultimodeReport::t_swap);

  py::class_<EchoReport>(m, "EchoReport")
      .def_readonly("simulated_photons", &EchoReport::simulated_photons)
      .def_readonly("analytic_photons", &EchoReport::analytic_photons)
      .def_readonly("cooperativity", &EchoReport::cooperativity);

  m.def("evolve", &evolve, py::arg("state"), py::arg("params"), py::arg("duration"),
        py::arg("dt") = 0.0);
  m.def("evolve_recorded", &evolve_recorded, py::arg("state"), py::arg("params"),
        py::arg("duration"), py::arg("dt") = 0.0, py::arg("max_trace_points") = 0);
  m.def("swap", &swap, py::arg("state"), py::arg("params"),
        "Transfer the cavity excitation into the spins (first depletion minimum).");
  m.def("apply_gradient", &apply_gradient, py::arg("state"), py::arg("phases"));
  m.def("mode_phases", &mode_phases, py::arg("n"), py::arg("k"));
  m.def("retrieve", &retrieve, py::arg("state"), py::arg("params"),
        py::arg("phases") = std::vector<double>{}, py::arg("duration") = 0.0);
  m.def("multimode_store_retrieve",
        [](const std::vector<std::complex<double>>& inputs, const MemoryParams& params) {
          return multimode_store_retrieve(to_eigen_vec(inputs), params);
        },
        py::arg("inputs"), py::arg("params"));
  m.def("echo_photon_count",
        [](double g0, double kappa, double gamma2_star, double n_spins, std::size_t n_sim) {
          EchoOptions opts;
          opts.n_sim = n_sim;
          return echo_photon_count(g0, kappa, gamma2_star, n_spins, opts);
        },
        py::arg("g0"), py::arg("kappa"), py::arg("gamma2_star"), py::arg("n_spins"),
        py::arg("n_sim") = 120);

  // ------------------------------------------------------------- sensitivity
  py::class_<NoiseModel>(m, "NoiseModel")
      .def(py::init([](double temperature_k, double omega0, double amplifier_added_photons) {
             return NoiseModel{temperature_k, omega0, amplifier_added_photons};
           }),
           py::arg("temperature_k") = 0.0, py::arg("omega0") = 0.0,
           py::arg("amplifier_added_photons") = 0.0)
      .def_readwrite("temperature_k", &NoiseModel::temperature_k)
      .def_readwrite("omega0", &NoiseModel::omega0)
      .def_readwrite("amplifier_added_photons", &NoiseModel::amplifier_added_photons);

  py::class_<SensitivityInputs>(m, "SensitivityInputs")
      .def(py::init([](double g0, double omega0, double quality, double gamma2_star,
                       double polarization, NoiseModel noise, double duty_cycle_factor,
                       double n_spins) {
             return SensitivityInputs{g0,    omega0, quality,           gamma2_star,
                                      polarization, noise, duty_cycle_factor, n_spins};
           }),
           py::arg("g0") = 0.0, py::arg("omega0") = 0.0, py::arg("quality") = 0.0,
           py::arg("gamma2_star") = 0.0, py::arg("polarization") = 1.0,
           py::arg("noise") = NoiseModel{}, py::arg("duty_cycle_factor") = 1.0 / 3.0,
           py::arg("n_spins") = 0.0)
      .def_readwrite("g0", &SensitivityInputs::g0)
      .def_readwrite("omega0", &SensitivityInputs::omega0)
      .def_readwrite("quality", &SensitivityInputs::quality)
      .def_readwrite("gamma2_star", &SensitivityInputs::gamma2_star)
      .def_readwrite("polarization", &SensitivityInputs::polarization)
      .def_readwrite("noise", &SensitivityInputs::noise)
      .def_readwrite("duty_cycle_factor", &SensitivityInputs::duty_cycle_factor)
      .def_readwrite("n_spins", &SensitivityInputs::n_spins);

  py::class_<SensitivityReport>(m, "SensitivityReport")
      .def_readonly("c0", &SensitivityReport::c0)
      .def_readonly("noise_photons", &SensitivityReport::noise_photons)
      .def_readonly("kappa", &SensitivityReport::kappa)
      .def_readonly("purcell_rate", &SensitivityReport::purcell_rate)
      .def_readonly("repetition_hz", &SensitivityReport::repetition_hz)
      .def_readonly("n_min", &SensitivityReport::n_min)
      .def_readonly("n_min_per_rt_hz", &SensitivityReport::n_min_per_rt_hz)
      .def_readonly("snr", &SensitivityReport::snr)
      .def_readonly("echo_photons", &SensitivityReport::echo_photons)
      .def_readonly("detectable", &SensitivityReport::detectable)
      .def_readonly("provenance", &SensitivityReport::provenance);

  m.def("cooperativity", &cooperativity, py::arg("g0"), py::arg("kappa"), py::arg("gamma2_star"));
  m.def("thermal_noise_photons", &thermal_noise_photons, py::arg("noise"));
  m.def("echo_snr", &echo_snr, py::arg("n_spins"), py::arg("polarization"), py::arg("c0"),
        py::arg("noise_photons"));
  m.def("min_spins", &min_spins, py::arg("polarization"), py::arg("c0"),
        py::arg("noise_photons"));
  m.def("sensitivity_per_root_hz", &sensitivity_per_root_hz, py::arg("n_min"),
        py::arg("repetition_hz"));
  m.def("full_report", &full_report, py::arg("inputs"));
  m.attr("DEMONSTRATED_MIN_SPINS") = reference::demonstrated_min_spins;
  m.attr("DEMONSTRATED_REPETITION_HZ") = reference::demonstrated_repetition_hz;
  m.attr("INFERRED_SENSITIVITY_PER_RT_HZ") = reference::inferred_sensitivity_per_rt_hz;

  // ------------------------------------------------------- scenarios/reports
  m.def("validate_scenario_text",
        [](const std::string& text) {
          const ScenarioFile sc = parse_scenario(text, "<python>");
          std::vector<std::string> out;
          for (const auto& d : validate_scenario(sc))
            out.push_back(format_diagnostic(d, sc.path));
          return out;
        },
        py::arg("text"), "Diagnostics for a scenario JSON string; empty means valid.");
  m.def("preset_library_json", [] { return preset_library().dump(); },
        "The bundled presets, as a JSON string.");
  m.def("run_scenario_json",
        [](const std::string& subcommand, const std::string& scenario_text,
           const std::string& out_dir, std::optional<std::uint64_t> seed, bool write_json,
           bool write_csv, int threads) {
          const ScenarioFile sc = parse_scenario(scenario_text, "<python>");
          RunOptions opt;
          opt.out_dir = out_dir;
          opt.seed = seed;
          opt.write_json = write_json;
          opt.write_csv = write_csv;
          opt.threads = threads;
          return run_scenario(subcommand, sc, opt).report.dump();
        },
        py::arg("subcommand"), py::arg("scenario_text"), py::arg("out_dir") = "",
        py::arg("seed") = std::nullopt, py::arg("write_json") = false,
        py::arg("write_csv") = false, py::arg("threads") = 0,
        "Run a subcommand on a scenario JSON string; returns the report as JSON.");
}
