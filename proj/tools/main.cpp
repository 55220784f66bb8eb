/// spinres: design calculations for spin-ensemble microwave memories and
/// pulsed magnetic-resonance sensitivity estimates.
///
/// Every subcommand reads a JSON scenario, validates it exhaustively, and
/// writes a JSON report (plus CSV tables) whose only nondeterministic field
/// is the timestamp. Exit codes: 0 success, 2 scenario/usage problems,
/// 3 physics or numerical failures.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "spinres/errors.hpp"
#include "spinres/runner.hpp"
#include "spinres/version.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_scenario = 2;
constexpr int exit_physics = 3;

struct Cli {
  std::string scenario_path;
  std::string out_dir;
  std::string format = "both";  // json | csv | both
  std::optional<std::uint64_t> seed;
  int threads = 0;
  bool quiet = false;
};

const char* subcommand_blurb(const std::string& name) {
  if (name == "spectrum") return "Energy levels vs field, and the transition list at one field";
  if (name == "clock-find") return "Locate df/dB = 0 operating points over a field range";
  if (name == "coupling") return "Zero-point field and single-spin couplings of a resonator";
  if (name == "purcell") return "Cavity-enhanced relaxation rates, detuning response, pulse power";
  if (name == "regime") return "Coupling-regime classification and margins for an ensemble";
  if (name == "memory-sim") return "Integrate the storage dynamics (trace, swap, retrieve, multimode, echo)";
  if (name == "sensitivity") return "Spin-detection floor and spins-per-sqrt(Hz) estimate";
  if (name == "sweep") return "Re-run a subcommand over a grid of one scenario parameter";
  return "";
}

int run(const std::string& name, const Cli& cli) {
  spinres::ScenarioFile sc;
  try {
    sc = spinres::load_scenario(cli.scenario_path);
  } catch (const spinres::ScenarioError& e) {
    std::cerr << e.what() << "\n";
    return exit_scenario;
  }
  // The report's inputs reflect the effective seed, not the overridden one.
  if (cli.seed) sc.doc["seed"] = *cli.seed;

  const auto diagnostics = spinres::validate_scenario(sc);
  if (!diagnostics.empty()) {
    for (const auto& d : diagnostics)
      std::cerr << spinres::format_diagnostic(d, sc.path) << "\n";
    return exit_scenario;
  }
  if (name == "validate") {
    if (!cli.quiet) std::cout << sc.path << ": ok\n";
    return exit_ok;
  }

  spinres::RunOptions options;
  options.out_dir = cli.out_dir;
  if (options.out_dir.empty()) {
    if (const char* env = std::getenv("SPINRES_OUT_DIR")) options.out_dir = env;
  }
  options.seed = cli.seed;
  options.threads = cli.threads;
  options.write_json = cli.format != "csv";
  options.write_csv = cli.format != "json";

  try {
    const auto artifacts = spinres::run_scenario(name, sc, options);
    if (!cli.quiet)
      for (const auto& f : artifacts.files) std::cout << "wrote " << f << "\n";
    return exit_ok;
  } catch (const spinres::ScenarioError& e) {
    std::cerr << e.what() << "\n";
    return exit_scenario;
  } catch (const spinres::InvalidInputError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return exit_scenario;
  } catch (const spinres::Error& e) {
    std::cerr << "failed: " << e.what() << "\n";
    return exit_physics;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spin-resonator design and simulation toolkit"};
  app.set_version_flag("--version", std::string("spinres ") + spinres::version);
  app.require_subcommand(1);

  Cli cli;
  std::string chosen;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-s,--scenario", cli.scenario_path, "Scenario JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("-o,--out", cli.out_dir,
                    "Output directory (default: $SPINRES_OUT_DIR, else the current directory)");
    sub->add_option("--seed", cli.seed, "Override the scenario RNG seed");
    sub->add_option("--format", cli.format, "Artifacts to write")
        ->check(CLI::IsMember({"json", "csv", "both"}));
    sub->add_option("--threads", cli.threads, "Sweep worker threads (0 = all cores)");
    sub->add_flag("-q,--quiet", cli.quiet, "Suppress the file listing");
    sub->callback([&chosen, sub] { chosen = sub->get_name(); });
  };

  for (const auto& name : spinres::subcommand_names())
    add_common(app.add_subcommand(name, subcommand_blurb(name)));
  add_common(app.add_subcommand("validate", "Check a scenario and report diagnostics"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_scenario;
  }

  return run(chosen, cli);
}
