#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pcace {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPipelineError = 1;
inline constexpr int kExitUsageError = 2;

/// Entry point of the `pcace` tool: subcommands rank, compare, hist, sorted.
/// args[0] is the program name. Results go to `out`, summaries and errors to
/// `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pcace
