#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hiermed::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 2,
  kDataError = 3,
};

/// Runs one command line (without the program name). Results go to `out`
/// unless --out is given; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Value of HIERMED_THREADS, or the hardware concurrency when unset/invalid.
unsigned thread_hint();

}  // namespace hiermed::cli
