#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nnad::cli {

enum ExitCode : int { exit_ok = 0, exit_usage = 2, exit_io = 3, exit_internal = 4 };

/// Runs the command line `args` (without the program name). Normal output goes to `out`
/// unless a command writes files; diagnostics go to `err`. Returns an ExitCode.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nnad::cli
