// Copyright 2026 The cfm Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cfm/error.h"

namespace cfm {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedProgram: return "MalformedProgram";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kNonPositiveInput: return "NonPositiveInput";
    case ErrorCode::kInsufficientCapacity: return "InsufficientCapacity";
    case ErrorCode::kNotLaminar: return "NotLaminar";
    case ErrorCode::kMonotonicityViolated: return "MonotonicityViolated";
    case ErrorCode::kBadGraph: return "BadGraph";
    case ErrorCode::kDelayLpInfeasible: return "DelayLpInfeasible";
    case ErrorCode::kSyntaxError: return "SyntaxError";
    case ErrorCode::kSemanticError: return "SemanticError";
    case ErrorCode::kEmptySet: return "EmptySet";
    case ErrorCode::kFeasibilityLpInfeasible: return "FeasibilityLpInfeasible";
    case ErrorCode::kNotMarginal: return "NotMarginal";
    case ErrorCode::kStageLpInfeasible: return "StageLpInfeasible";
    case ErrorCode::kValidDualInfeasible: return "ValidDualInfeasible";
    case ErrorCode::kValidDualUnbounded: return "ValidDualUnbounded";
    case ErrorCode::kBracketExhausted: return "BracketExhausted";
    case ErrorCode::kEpsilonNotFound: return "EpsilonNotFound";
    case ErrorCode::kNoTightSet: return "NoTightSet";
    case ErrorCode::kFinalFeasibilityInfeasible:
      return "FinalFeasibilityInfeasible";
    case ErrorCode::kDegenerateInstance: return "DegenerateInstance";
    case ErrorCode::kGroundSetTooLarge: return "GroundSetTooLarge";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNotSchedulingInstance: return "NotSchedulingInstance";
    case ErrorCode::kTraceMismatch: return "TraceMismatch";
  }
  return "Unknown";
}

bool IsPreconditionViolation(ErrorCode code) {
  switch (code) {
    case ErrorCode::kStageLpInfeasible:
    case ErrorCode::kValidDualInfeasible:
    case ErrorCode::kValidDualUnbounded:
    case ErrorCode::kBracketExhausted:
    case ErrorCode::kEpsilonNotFound:
    case ErrorCode::kNoTightSet:
    case ErrorCode::kFinalFeasibilityInfeasible:
    case ErrorCode::kDegenerateInstance:
    case ErrorCode::kFeasibilityLpInfeasible:
    case ErrorCode::kDelayLpInfeasible:
    case ErrorCode::kGroundSetTooLarge:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code) {}

}  // namespace cfm
