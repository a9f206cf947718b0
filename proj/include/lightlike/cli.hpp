#pragma once

#include <iosfwd>

#include "lightlike/verify.hpp"

namespace lightlike {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitPassed = 0,
  kExitConditionFailed = 1,
  kExitInputError = 2,
  kExitConsistencyFault = 3,
};

int exit_code_for(PipelineStatus status) noexcept;

/// Runs the `lightlike` tool in-process; argv[0] is the program name.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lightlike
