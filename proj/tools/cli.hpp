#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qot::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kNotConverged = 2,
  kBoundViolation = 3,
};

/// Runs the command line `args` (without the program name), writing human
/// output to `out` and diagnostics to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qot::cli
