// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace singprod {

enum class ErrorCode {
  ZeroAtom,
  CancellingAtoms,
  BadWeights,
  BadSupport,
  UnsupportedScale,
  ZeroEntry,
  ZeroParam,
  DegenerateSample,
  MissingLambda,
  ZeroVariance,
  Nonconvergence,
  ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

// All library failures are reported through this type; the code selects the
// CLI exit status.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

}  // namespace singprod
