#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace khom::cli {

enum ExitCode : int { ok = 0, input_error = 2, instability = 3, check_failed = 4 };

/// Runs one command line (args exclude the program name). Reports go to
/// `out` unless --output names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace khom::cli
