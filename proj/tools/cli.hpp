#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace procrastinate::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,             // success; feasible for solve/check
  kInfeasible = 1,     // solve/check: infeasible
  kIndeterminate = 2,  // solve/check: undecided at this precision
  kUsage = 64,         // bad flags, parameters, unsupported input or unreadable files
};

/// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace procrastinate::cli
