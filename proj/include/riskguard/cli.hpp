#pragma once

#include <iosfwd>

namespace riskguard::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kDataFormat = 3,
  kInfeasible = 4,
};

/// Parses argv, runs the chosen subcommand and returns the process exit
/// status. Results go to `out` unless an --output file is given; diagnostics
/// go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace riskguard::cli
