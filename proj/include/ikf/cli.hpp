#pragma once

#include <iosfwd>

namespace ikf {

/// Exit codes: 0 success, 1 usage / I/O / parse error, 2 infeasible configuration.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitInfeasible = 2;

/// Entry point of the `ikf` tool; writes reports to `out`, diagnostics to `err`.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ikf
