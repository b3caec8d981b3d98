// SPDX-License-Identifier: Apache-2.0
#include "singprod/error.hpp"

namespace singprod {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ZeroAtom: return "ZeroAtom";
    case ErrorCode::CancellingAtoms: return "CancellingAtoms";
    case ErrorCode::BadWeights: return "BadWeights";
    case ErrorCode::BadSupport: return "BadSupport";
    case ErrorCode::UnsupportedScale: return "UnsupportedScale";
    case ErrorCode::ZeroEntry: return "ZeroEntry";
    case ErrorCode::ZeroParam: return "ZeroParam";
    case ErrorCode::DegenerateSample: return "DegenerateSample";
    case ErrorCode::MissingLambda: return "MissingLambda";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::Nonconvergence: return "Nonconvergence";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace singprod
