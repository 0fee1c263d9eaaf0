#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bucketwidth::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int { solved = 0, infeasible = 1, usage = 2, verify_mismatch = 3 };

/// Runs one command line (without the program name). JSON goes to `out`, the
/// human-readable summary and diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bucketwidth::cli
