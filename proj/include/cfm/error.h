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

#ifndef CFM_ERROR_H_
#define CFM_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace cfm {

enum class ErrorCode {
  kMalformedProgram,
  kLengthMismatch,
  kNonPositiveInput,
  kInsufficientCapacity,
  kNotLaminar,
  kMonotonicityViolated,
  kBadGraph,
  kDelayLpInfeasible,
  kSyntaxError,
  kSemanticError,
  kEmptySet,
  kFeasibilityLpInfeasible,
  kNotMarginal,
  kStageLpInfeasible,
  kValidDualInfeasible,
  kValidDualUnbounded,
  kBracketExhausted,
  kEpsilonNotFound,
  kNoTightSet,
  kFinalFeasibilityInfeasible,
  kDegenerateInstance,
  kGroundSetTooLarge,
  kDimensionMismatch,
  kNotSchedulingInstance,
  kTraceMismatch,
};

std::string_view ErrorCodeName(ErrorCode code);

// Solver precondition failures map to exit code 3 in the cli.
bool IsPreconditionViolation(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cfm

#endif  // CFM_ERROR_H_
