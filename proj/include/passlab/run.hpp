#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace passlab {

enum class Subcommand { arrival, passage, reset_state, discrete_compare, kijowski, precision_sweep };

/// "arrival", "passage", "reset-state", "discrete-compare", "kijowski", "precision-sweep".
std::optional<Subcommand> parse_subcommand(const std::string& name);
std::string subcommand_name(Subcommand s);

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,      ///< bad arguments, missing or unwritable files
  kExitConfig = 2,     ///< config fails to parse or validate
  kExitNumerical = 3,  ///< convergence, stability or grid failure
  kExitRegime = 4,     ///< outputs written but physical-regime warnings raised, or regime error
};

struct RunOptions {
  Subcommand subcommand = Subcommand::passage;
  std::string config_path;  ///< empty: built-in defaults
  std::string out_dir = ".";
  int threads = 0;          ///< 0: PASSLAB_THREADS, else the OpenMP default
  bool emit_plots = false;
};

struct RunOutcome {
  int exit_code = kExitOk;
  std::vector<std::string> files;  ///< written, relative to out_dir
  std::string summary;             ///< JSON text also written to summary.json
};

/// Loads the config, runs one subcommand and writes its CSV tables,
/// summary.json and optionally plot.py into out_dir. Diagnostics go to `log`.
RunOutcome run(const RunOptions& options, std::ostream& log);

}  // namespace passlab
