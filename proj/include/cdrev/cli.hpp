#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cdrev::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
};

/// Runs the command line `args` (args[0] is the program name). Diagnostics go
/// to `err`, summaries to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cdrev::cli
