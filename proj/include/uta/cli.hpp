#pragma once

// Command-line front end.  main() is a thin wrapper around run_command so
// tests can drive the exact CLI surface in-process.
//
// Exit codes: 0 success, 1 validation/analysis failure, 2 non-convergence,
// 64 usage error.

#include <iosfwd>
#include <string>
#include <vector>

namespace uta {
namespace cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitNoConvergence = 2;
inline constexpr int kExitUsage = 64;

// args excludes the program name.
int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err);

// Fixed 9-decimal rendering used for every number the CLI prints.
std::string fmt9(double x);

}  // namespace cli
}  // namespace uta
