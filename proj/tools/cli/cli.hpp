#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mochlab::cli {

enum ExitCode : int {
  kOk = 0,
  /// A self-check command ran but some check failed.
  kCheckFailed = 1,
  kUsage = 2,
  kConfigParse = 3,
  kUnknownKey = 4,
  kOutOfRange = 5,
  kNotFound = 6,
  kUnwritable = 7,
  kNumerical = 8,
};

/// Runs the tool with argv-style arguments (args[0] is the program name).
/// Progress goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mochlab::cli
