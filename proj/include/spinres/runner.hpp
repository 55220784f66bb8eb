#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spinres/scenario.hpp"

namespace spinres {

struct RunOptions {
  std::string out_dir;  ///< empty means the current directory
  std::optional<std::uint64_t> seed;  ///< overrides any scenario seed
  bool write_json = true;
  bool write_csv = true;
  int threads = 0;  ///< sweep fan-out; 0 picks the hardware concurrency
};

/// What a run produced: the report document and the files written (JSON
/// first, then CSV tables, in a deterministic order).
struct RunArtifacts {
  json report;
  std::vector<std::string> files;
};

/// All runnable subcommands, including "sweep".
const std::vector<std::string>& subcommand_names();

/// Execute one subcommand against a parsed scenario and write its artifacts.
/// The report is deterministic except for the timestamp_utc field; an
/// explicit seed makes sampled ensembles reproducible too. Errors surface as
/// ScenarioError (bad scenario content) or the domain exceptions.
RunArtifacts run_scenario(const std::string& subcommand, const ScenarioFile& sc,
                          const RunOptions& options = {});

}  // namespace spinres
