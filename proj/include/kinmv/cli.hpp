#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kinmv/diagnostics.hpp"
#include "kinmv/hypotheses.hpp"
#include "kinmv/integrator.hpp"

namespace kinmv {

struct RunConfig {
  std::string command = "simulate";
  SimulationConfig sim;
  SamplerSpec validate;
  // diagnose
  std::vector<double> lags;  // empty: 4, 2, 1 snapshot intervals
  StateBlock block = StateBlock::kZ;
  // ladder
  LadderSpec ladder;
  // independence
  std::vector<double> times;  // empty: T/4, T/2, T on the snapshot grid
  std::vector<std::string> f_ids;  // empty: all
  std::vector<std::string> g_ids;  // empty: all non-constant
  // output
  std::filesystem::path out = "run";
  bool csv = true;
  unsigned workers = 1;  // never echoed: results do not depend on it
};

// One `key = value` line. `source` is the file name or the flag it came from.
struct ConfigEntry {
  std::string section;  // "" for the root section
  std::string key;
  std::string value;
  std::string source;
  std::size_t line = 0;
};

// Sectioned key=value text:
//
//   # comment
//   system = "rough"
//   N = 1000
//   [init]
//   kind = gaussian
//
// Throws ConfigError naming the line for malformed input.
std::vector<ConfigEntry> ParseConfigText(const std::string& text,
                                         const std::string& source);

// "section.key=value" or "key=value" from a --set flag.
ConfigEntry ParseOverride(const std::string& text, const std::string& source);

// Applies entries in order (later ones win) on top of the documented
// defaults. Unknown keys, values of the wrong type and a missing `system`
// throw ConfigError naming the key and line.
RunConfig ResolveConfig(const std::vector<ConfigEntry>& entries);

// Every known key as "section.key", root keys without prefix.
std::vector<std::string> KnownConfigKeys();

// Executes the subcommand, writing report.json (and CSV tables) under
// config.out. Prints one "summary: ..." line to `out`; on failure prints a
// single "error: <ErrorClass>: <message>" line to `err`. Returns 0 on success,
// 1 when validation finds a violated hypothesis, 2 for configuration errors
// and 3 for run-time failures.
int Run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace kinmv
