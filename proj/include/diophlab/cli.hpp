#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace diophlab {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,  // an exact check failed (verify)
  kExitPrecision = 2,    // precision cap reached
  kExitUsage = 3,        // invalid spec, bad arguments, lambda out of range
};

/// Runs the command line `args` (without the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace diophlab
