#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace didpr::cli {

/// Exit codes beyond CLI11's own parse errors.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUnattainable = 2;

/// Run the command line `args` (program name excluded). Normal output goes to
/// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace didpr::cli
