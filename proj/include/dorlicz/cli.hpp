#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dorlicz {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs the command line `args` (without the program name). Human-readable
/// output goes to `out`, diagnostics to `err`. Returns the exit status:
/// 0 success, 1 numerical/optimizer failure or a failing exact check,
/// 2 usage or config error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dorlicz
