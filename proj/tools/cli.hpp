#ifndef NWS_TOOLS_CLI_HPP
#define NWS_TOOLS_CLI_HPP

#include <ostream>

namespace nws::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumeric = 3;

/// Runs the command-line tool. Exit codes: 0 success, 2 input error,
/// 3 numerical abort.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nws::cli

#endif  // NWS_TOOLS_CLI_HPP
