#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace fcs::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitVerifyFailed = 1,
    kExitUsage = 2,
    kExitNumerical = 3,
};

/// Parses args (without the program name) and runs the selected subcommand.
/// Normal output goes to out, diagnostics to err. Returns the exit code.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace fcs::cli
