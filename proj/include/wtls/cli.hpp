#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wtls::cli {

/// Exit codes: 0 success, 1 error, 2 best-effort result whose existence is
/// not certified.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitHeuristic = 2;

/// Runs one command line (without the program name). Results go to `out`
/// unless --out names a file; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wtls::cli
