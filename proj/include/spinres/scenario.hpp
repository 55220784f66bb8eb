#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "spinres/ensemble.hpp"
#include "spinres/resonator.hpp"
#include "spinres/sensitivity.hpp"
#include "spinres/spin_system.hpp"

namespace spinres {

using json = nlohmann::ordered_json;

/// One validation finding, anchored to the scenario text where possible.
struct Diagnostic {
  int line = 0;    ///< 1-based, 0 when no anchor exists
  int column = 0;  ///< 1-based byte column
  std::string pointer;  ///< JSON pointer of the offending node
  std::string message;
};

/// "path:line:col: message" (line/col omitted when unknown).
std::string format_diagnostic(const Diagnostic& d, const std::string& path);

/// A parsed scenario document with its source text retained for diagnostics.
/// String presets are expanded in `doc` at parse time; the original spelling
/// survives in `text`.
struct ScenarioFile {
  std::string path;
  std::string text;
  json doc;
};

/// Parse scenario text. Throws ScenarioError with a line/column anchor on
/// malformed input; unknown presets survive parsing and surface in
/// validate_scenario / the builders.
ScenarioFile parse_scenario(std::string text, std::string name = "<inline>");

/// Read and parse a scenario file. Throws ScenarioError if unreadable.
ScenarioFile load_scenario(const std::string& path);

/// Exhaustive structural and physical validation without running anything.
/// Empty result means the scenario is valid.
std::vector<Diagnostic> validate_scenario(const ScenarioFile& sc);

/// Bundled presets, keyed by section: {"spin_systems": {...}, "resonators":
/// {...}, "sensitivity": {...}}. Each preset lists its generic assumptions
/// (as opposed to characterized device values) in an "_assumed" array.
const json& preset_library();

/// Best-effort line/column of a JSON pointer in the scenario text.
Diagnostic locate_pointer(const ScenarioFile& sc, const std::string& pointer,
                          std::string message);

// Section builders. All throw ScenarioError naming the missing or offending
// key; physical validation is delegated to the domain types.
SpinSystem spin_system_from(const json& node);
ResonatorModel resonator_from(const json& node);
SpinEnsemble ensemble_from(const json& node, const ResonatorModel* resonator,
                           std::optional<std::uint64_t> seed_override);
SpinLifetimes lifetimes_from(const json& node);
NoiseModel noise_from(const json& node, double omega0);
SensitivityInputs sensitivity_inputs_from(const json& root);

}  // namespace spinres
