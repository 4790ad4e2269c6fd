#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ecstab {

/// Exit statuses beyond 0 (success) and CLI11's usage codes.
enum ExitCode : int {
  kExitFailure = 1,
  kExitInvalid = 2,
  /// Certificate emitted but its conclusions are withheld.
  kExitWithheld = 3,
};

/// Runs the command line `args` (without the program name).
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Records file used when --records is not given.
std::string default_records_path();

}  // namespace ecstab
