// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>

#include "singprod/error.hpp"

namespace singprod::cli {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kConfig = 2,
  kValidation = 3,
  kNonconvergence = 4,
  kDegenerateSample = 5,
};

int exit_code_for(ErrorCode code) noexcept;

// Runs one invocation. Reports go to `out` (or the --out file), structured
// errors and help text to `err`/`out` respectively. Returns the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace singprod::cli
