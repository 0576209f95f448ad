#pragma once

#include <iosfwd>

namespace sparsecand {

// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitLimit = 3 };

// Subcommands learn, sample, eval and synth. Output paths of "-" mean `out`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace sparsecand
