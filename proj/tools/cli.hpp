#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qwork::cli {

enum ExitCode : int {
  kSuccess = 0,
  kInternalError = 1,
  kInvalidInput = 2,
  kPrecisionFailure = 3,
  kCrossCheckMismatch = 4,
};

/// Runs one command line (args excludes the program name). Diagnostics go
/// to `err`, progress and help to `out`; result files go under --out.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qwork::cli
