#pragma once

#include <iosfwd>

namespace isrsgn {

/// Exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitQuadrature = 3,
  kExitAliasing = 4,
};

/// Parses and runs one command (gn-run, ssfm-run, compare, scenario-gen,
/// launch-opt). Progress goes to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace isrsgn
