#pragma once

#include <iosfwd>

namespace uavmc {

/// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitBadInput = 2;
inline constexpr int kExitScope = 3;

/// Runs one command line (argv[0] is the program name). Regular output goes
/// to out, diagnostics to err; nothing else touches the standard streams.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace uavmc
