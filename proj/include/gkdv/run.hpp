#pragma once

// Experiment orchestration behind the command line. Configuration is a flat
// key=value map: built-in defaults, then per-experiment defaults, then the
// config file, then flag overrides. Everything is validated before any work
// starts and all violations are reported together.

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace gkdv::cli {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kVersion = "0.1.0";

enum ExitCode { kOk = 0, kInvalid = 2, kNumerical = 3 };

enum class KeyType { integer, real, text, boolean, list };

struct KeySpec {
  std::string key;
  std::string fallback;
  KeyType type;
  std::string help;
};

const std::vector<KeySpec>& schema();
const std::vector<std::string>& experiments();

using KeyValues = std::map<std::string, std::string>;

/// Parses "key = value" lines; '#' starts a comment. Malformed lines are
/// collected and reported in one ValidationError.
KeyValues parse_config_text(const std::string& text);

struct RunConfig {
  std::string experiment;
  KeyValues values;
  bool dry_run = false;

  double real(const std::string& key) const;
  long integer(const std::string& key) const;
  const std::string& text(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<double> list(const std::string& key) const;
};

/// Merges the layers and validates; throws ValidationError listing every problem.
RunConfig resolve(const std::string& experiment, const KeyValues& file_values, const KeyValues& overrides);

/// Human-readable plan: grid, band count, trial count, memory estimate.
std::string dry_run_plan(const RunConfig& cfg);

/// Output directory: out_dir key, else $GKDV_OUT_DIR, else ./gkdv_out.
std::string output_directory(const RunConfig& cfg);

/// Runs the experiment and writes its report(s). Returns an ExitCode.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace gkdv::cli
