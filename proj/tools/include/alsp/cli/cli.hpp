#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace alsp::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kMissingLayer = 3,
  kMissingAlignment = 4,
  kCorpusMismatch = 5,
  kConfigError = 6,
};

/// Runs the `alsp` command line; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace alsp::cli
