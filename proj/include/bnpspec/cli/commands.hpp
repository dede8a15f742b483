#pragma once

#include <functional>
#include <iosfwd>
#include <string>

#include "bnpspec/cli/config.hpp"

namespace bnpspec::cli {

/// Stable process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitInit = 3,
  kExitNumeric = 4,
  kExitVerifyFailed = 5,
};

/// Writes `series.csv` and `metadata.json` into config.output. Needs a seed,
/// a preset and n.
int cmd_simulate(const RunConfig& config, std::ostream& log);

/// Reads config.input, fits, and writes `trace.jsonl`, `draws.csv`,
/// `summary.csv` and `diagnostics.json`. Needs a seed.
int cmd_fit(const RunConfig& config, std::ostream& log);

/// which: szego | lln | h | contraction | props. Writes `report.csv` and
/// `verdict.json`; returns kExitVerifyFailed when a check fails.
int cmd_verify(const RunConfig& config, const std::string& which, std::ostream& log);

/// Runs `body` and maps exceptions to exit codes (config 2, init 3, numeric 4),
/// printing the message to `err`.
int run_guarded(const std::function<int()>& body, std::ostream& err);

}  // namespace bnpspec::cli
