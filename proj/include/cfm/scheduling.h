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

// Equilibrium computation for the single-machine scheduling market.
//
// Segments are built right to left: each round picks the agent set with the
// smallest price slope lambda given the lowest price already committed, gives
// it the latest free slots and prices them on a line of slope -lambda.

#ifndef CFM_SCHEDULING_H_
#define CFM_SCHEDULING_H_

#include <vector>

#include "cfm/market.h"
#include "cfm/rational.h"

namespace cfm {

struct SchedulingSegment {
  std::vector<int> agents;  // ascending agent indices
  Rational lambda;
  int first_slot = 0;  // 1-based, inclusive
  int last_slot = 0;
  std::vector<Rational> slot_prices;  // for first_slot..last_slot
  int search_steps = 0;
};

struct SchedulingEquilibrium {
  // segments[0] holds the latest slots.
  std::vector<SchedulingSegment> segments;
  PriceVector prices;
  Allocation allocation;
};

struct SchedulingInput {
  std::vector<Rational> budgets;
  std::vector<int> requirements;
};

Rational LambdaOf(const std::vector<int>& agents, const Rational& p_low,
                  const SchedulingInput& in);

Rational FSched(const std::vector<int>& agents, const Rational& p_low,
                const Rational& lambda, const SchedulingInput& in);

struct NextSegmentResult {
  std::vector<int> agents;
  Rational lambda;
  int steps = 0;
};

// Among nonempty subsets of remaining, the one of least lambda; ties resolve
// to the union of all minimizers.
NextSegmentResult NextSegmentScheduling(const Rational& p_low,
                                        const std::vector<int>& remaining,
                                        const SchedulingInput& in);

// Slots 1..sum(r) + spare_slots; the spare slots stay unpriced.
SchedulingEquilibrium SolveScheduling(const SchedulingInput& in,
                                      int spare_slots = 0);

// Allocation of one segment's slots among its agents (rows of the full
// allocation restricted to the segment's agents and slots).
Allocation AllocateSegment(const SchedulingSegment& segment,
                           const SchedulingInput& in);

// Whether the agent holds exactly the last r_i slots of its segment.
bool IsMarginal(const SchedulingEquilibrium& eq, const SchedulingInput& in,
                int agent);

// Infimum of budget declarations that leave every segment found before the
// agent's own unchanged. Throws kNotMarginal.
Rational MarginalPayment(const SchedulingInput& in,
                         const SchedulingEquilibrium& eq, int agent);

Equilibrium ToEquilibrium(const SchedulingEquilibrium& eq, int num_agents);

}  // namespace cfm

#endif  // CFM_SCHEDULING_H_
