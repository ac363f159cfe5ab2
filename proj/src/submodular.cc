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

#include "cfm/submodular.h"

#include <string>

#include "cfm/error.h"

namespace cfm {

std::vector<int> MaskElements(SubsetMask mask) {
  std::vector<int> out;
  for (int k = 0; mask != 0; ++k, mask >>= 1) {
    if (mask & 1u) out.push_back(k);
  }
  return out;
}

bool LexLess(SubsetMask a, SubsetMask b) {
  std::vector<int> ea = MaskElements(a);
  std::vector<int> eb = MaskElements(b);
  return ea < eb;
}

namespace {

void CheckSize(int n) {
  if (n <= 0) throw Error(ErrorCode::kEmptySet, "empty ground set");
  if (n > kEnumerationLimit) {
    throw Error(ErrorCode::kGroundSetTooLarge,
                "ground set of size " + std::to_string(n));
  }
}

}  // namespace

MinimizeResult Minimize(const SetFunction& f, const AdvancedMinimizer* advanced) {
  if (f.ground_size > kEnumerationLimit && advanced != nullptr) {
    return (*advanced)(f);
  }
  CheckSize(f.ground_size);
  const SubsetMask full = (SubsetMask{1} << f.ground_size) - 1;
  std::optional<Rational> best;
  SubsetMask union_of = 0;
  SubsetMask smallest = 0;
  for (SubsetMask s = 1; s <= full; ++s) {
    Rational v = f.eval(s);
    if (!best || v < *best) {
      best = std::move(v);
      union_of = s;
      smallest = s;
    } else if (v == *best) {
      union_of |= s;
      if (LexLess(s, smallest)) smallest = s;
    }
  }
  MinimizeResult out;
  out.value = *best;
  if (f.eval(union_of) == *best) {
    out.minimizer = union_of;
  } else {
    out.minimizer = smallest;
    out.lattice = false;
  }
  return out;
}

std::optional<SubmodularityViolation> CheckSubmodular(const SetFunction& f) {
  CheckSize(f.ground_size);
  const int n = f.ground_size;
  const SubsetMask full = (SubsetMask{1} << n) - 1;
  std::vector<Rational> value(full + 1);
  for (SubsetMask s = 1; s <= full; ++s) value[s] = f.eval(s);
  // The local exchange inequality on nonempty S chains up to every pair
  // S subset of T.
  for (SubsetMask s = 1; s <= full; ++s) {
    for (int x = 0; x < n; ++x) {
      if (s & (SubsetMask{1} << x)) continue;
      for (int y = 0; y < n; ++y) {
        if (y == x || (s & (SubsetMask{1} << y))) continue;
        const SubsetMask sx = s | (SubsetMask{1} << x);
        const SubsetMask sy = s | (SubsetMask{1} << y);
        if (value[sx] - value[s] < value[sx | sy] - value[sy]) {
          return SubmodularityViolation{s, sy, x};
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace cfm
