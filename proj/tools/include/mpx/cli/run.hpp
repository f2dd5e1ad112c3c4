#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mpx::cli {

/// Exit statuses of the command-line tool.
enum ExitStatus : int {
    exit_ok = 0,
    exit_condition_failed = 1,
    exit_input_error = 2,
};

/// Runs one invocation; args excludes the program name. Output goes to out,
/// diagnostics and usage text to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mpx::cli
