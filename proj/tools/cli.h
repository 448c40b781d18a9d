#pragma once

#include <iosfwd>

namespace ghcft {

/// Exit statuses of the `ghcft` command.
enum ExitCode : int {
  kExitOk = 0,
  kExitAnalysisError = 1,
  kExitUsageError = 2,
  kExitResourceLimit = 3,
};

/// Runs one invocation. Reports go to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace ghcft
