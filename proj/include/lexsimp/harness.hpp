#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace lexsimp {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitData = 3,
  kExitBackend = 4,
};

/// Entry point of the `lexsimp` command line. `args` excludes the program
/// name. Subcommands: stats, split, preprocess, mlm-candidates, generate,
/// score, search-tokens, rank-backends.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lexsimp
