#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dmetrics::cli {

enum ExitCode : int {
  ok = 0,
  usage_error = 1,
  numerical_failure = 2,
  verification_failed = 3,
};

/// Runs one command line (args excludes the program name). Normal output
/// goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dmetrics::cli
