#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace occulimits {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
    exit_ok = 0,
    exit_input_error = 2,
    exit_solver_error = 3,
    exit_sandwich_violation = 4,
    exit_certification_failure = 5,
};

/// Runs the command line given as argv (args[0] is the program name).
/// Reports go to out, diagnostics to err. Returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace occulimits
