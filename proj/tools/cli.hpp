#pragma once

#include <iosfwd>

namespace gpbucb::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kNumericalError = 3,
  kIoError = 4,
  kInternalError = 5,
};

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gpbucb::cli
