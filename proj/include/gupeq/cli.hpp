#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gupeq {

/// Exit codes of the command-line front end.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 2,          ///< usage or validation error
    kExitIndeterminate = 3,  ///< a convergence test could not decide
    kExitNumerical = 4,      ///< internal numerical failure
};

/// Runs the command line `args` (without the program name). Results go to
/// `out` unless --out names a file; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gupeq
