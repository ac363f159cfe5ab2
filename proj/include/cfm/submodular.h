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

// Minimization of set functions over the nonempty subsets of a small ground
// set, plus an exhaustive submodularity test.
//
// Subsets are bitmasks over ground positions 0..n-1.

#ifndef CFM_SUBMODULAR_H_
#define CFM_SUBMODULAR_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "cfm/rational.h"

namespace cfm {

using SubsetMask = std::uint32_t;

struct SetFunction {
  int ground_size = 0;
  std::function<Rational(SubsetMask)> eval;
};

struct MinimizeResult {
  SubsetMask minimizer = 0;
  Rational value;
  // False when the union of all minimizers is not itself a minimizer; the
  // lexicographically smallest minimizer is returned instead.
  bool lattice = true;
};

// Optional replacement for enumeration on large ground sets.
using AdvancedMinimizer = std::function<MinimizeResult(const SetFunction&)>;

inline constexpr int kEnumerationLimit = 20;

// Exact minimum over nonempty subsets. Above kEnumerationLimit the advanced
// minimizer is used when given, otherwise kGroundSetTooLarge is thrown.
MinimizeResult Minimize(const SetFunction& f,
                        const AdvancedMinimizer* advanced = nullptr);

struct SubmodularityViolation {
  SubsetMask s = 0;
  SubsetMask t = 0;
  int x = -1;
};

// Checks f(S+x) - f(S) >= f(T+x) - f(T) for nonempty S subset of T, x not in
// T. Returns the first violation found, or nullopt.
std::optional<SubmodularityViolation> CheckSubmodular(const SetFunction& f);

// Sorted-element lexicographic order on masks.
bool LexLess(SubsetMask a, SubsetMask b);

std::vector<int> MaskElements(SubsetMask mask);

}  // namespace cfm

#endif  // CFM_SUBMODULAR_H_
