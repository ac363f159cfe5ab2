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

#include "cfm/scheduling.h"

#include <algorithm>
#include <string>

#include "cfm/error.h"
#include "cfm/lp.h"
#include "cfm/submodular.h"

namespace cfm {
namespace {

struct Totals {
  Rational money;
  long slots = 0;
};

Totals TotalsOf(const std::vector<int>& agents, const SchedulingInput& in) {
  if (agents.empty()) throw Error(ErrorCode::kEmptySet, "agent set");
  Totals t;
  for (int i : agents) {
    t.money += in.budgets[i];
    t.slots += in.requirements[i];
  }
  return t;
}

std::vector<int> Pick(const std::vector<int>& ground, SubsetMask mask) {
  std::vector<int> out;
  for (int k : MaskElements(mask)) out.push_back(ground[k]);
  std::sort(out.begin(), out.end());
  return out;
}

void CheckInput(const SchedulingInput& in) {
  if (in.budgets.size() != in.requirements.size()) {
    throw Error(ErrorCode::kLengthMismatch, "budgets vs requirements");
  }
  if (in.budgets.empty()) throw Error(ErrorCode::kNonPositiveInput, "no agents");
  for (size_t i = 0; i < in.budgets.size(); ++i) {
    if (sgn(in.budgets[i]) <= 0 || in.requirements[i] < 1) {
      throw Error(ErrorCode::kNonPositiveInput,
                  "agent " + std::to_string(i + 1));
    }
  }
}

}  // namespace

Rational LambdaOf(const std::vector<int>& agents, const Rational& p_low,
                  const SchedulingInput& in) {
  Totals t = TotalsOf(agents, in);
  return 2 * (t.money - p_low * t.slots) / Rational(t.slots * (t.slots + 1));
}

Rational FSched(const std::vector<int>& agents, const Rational& p_low,
                const Rational& lambda, const SchedulingInput& in) {
  Totals t = TotalsOf(agents, in);
  return t.money - p_low * t.slots -
         lambda * Rational(t.slots * (t.slots + 1)) / 2;
}

NextSegmentResult NextSegmentScheduling(const Rational& p_low,
                                        const std::vector<int>& remaining,
                                        const SchedulingInput& in) {
  if (remaining.empty()) throw Error(ErrorCode::kEmptySet, "remaining agents");
  auto minimize_at = [&](const Rational& lambda) {
    SetFunction f{static_cast<int>(remaining.size()), [&](SubsetMask s) {
                    return FSched(Pick(remaining, s), p_low, lambda, in);
                  }};
    return Minimize(f);
  };
  // f is nonpositive at the largest budget for every singleton.
  Rational hi = 0;
  for (int i : remaining) hi = std::max(hi, in.budgets[i]);
  NextSegmentResult out;
  MinimizeResult at_hi = minimize_at(hi);
  std::vector<int> candidate = Pick(remaining, at_hi.minimizer);
  // Each step moves hi down to the root of the current minimizer's line, so
  // the bracket closes on the least lambda after finitely many steps.
  while (true) {
    ++out.steps;
    Rational lambda = LambdaOf(candidate, p_low, in);
    MinimizeResult at = minimize_at(lambda);
    if (sgn(at.value) == 0) {
      out.agents = Pick(remaining, at.minimizer);
      out.lambda = lambda;
      return out;
    }
    candidate = Pick(remaining, at.minimizer);
  }
}

Allocation AllocateSegment(const SchedulingSegment& segment,
                           const SchedulingInput& in) {
  const int width = segment.last_slot - segment.first_slot + 1;
  const int k = static_cast<int>(segment.agents.size());
  lp::LinearProgram prog;
  for (int v = 0; v < k * width; ++v) prog.AddVariable();
  for (int a = 0; a < k; ++a) {
    const int i = segment.agents[a];
    std::vector<lp::Term> cover, spend;
    for (int t = 0; t < width; ++t) {
      cover.push_back({a * width + t, 1});
      spend.push_back({a * width + t, segment.slot_prices[t]});
    }
    prog.AddConstraint(cover, lp::Relation::kGreaterEqual, in.requirements[i]);
    prog.AddConstraint(spend, lp::Relation::kLessEqual, in.budgets[i]);
  }
  for (int t = 0; t < width; ++t) {
    std::vector<lp::Term> supply;
    for (int a = 0; a < k; ++a) supply.push_back({a * width + t, 1});
    prog.AddConstraint(supply, lp::Relation::kLessEqual, 1);
  }
  auto point = lp::SolveFeasibility(prog);
  if (!point) {
    std::string who;
    for (int i : segment.agents) who += " " + std::to_string(i + 1);
    throw Error(ErrorCode::kFeasibilityLpInfeasible, "segment" + who);
  }
  Allocation out(k, std::vector<Rational>(width));
  for (int a = 0; a < k; ++a)
    for (int t = 0; t < width; ++t) out[a][t] = (*point)[a * width + t];
  return out;
}

SchedulingEquilibrium SolveScheduling(const SchedulingInput& in,
                                      int spare_slots) {
  CheckInput(in);
  const int n = static_cast<int>(in.budgets.size());
  int total = 0;
  for (int r : in.requirements) total += r;
  SchedulingEquilibrium eq;
  eq.prices.assign(total + spare_slots, Rational(0));
  eq.allocation.assign(n, std::vector<Rational>(total + spare_slots));
  std::vector<int> remaining(n);
  for (int i = 0; i < n; ++i) remaining[i] = i;
  Rational p_low = 0;
  int upper = total + 1;  // T^{k-1}
  while (!remaining.empty()) {
    NextSegmentResult next = NextSegmentScheduling(p_low, remaining, in);
    SchedulingSegment seg;
    seg.agents = next.agents;
    seg.lambda = next.lambda;
    seg.search_steps = next.steps;
    long width = 0;
    for (int i : seg.agents) width += in.requirements[i];
    seg.first_slot = upper - static_cast<int>(width);
    seg.last_slot = upper - 1;
    for (int t = seg.first_slot; t <= seg.last_slot; ++t) {
      seg.slot_prices.push_back(p_low + Rational(upper - t) * seg.lambda);
      eq.prices[t - 1] = seg.slot_prices.back();
    }
    Allocation part = AllocateSegment(seg, in);
    for (size_t a = 0; a < seg.agents.size(); ++a) {
      for (int t = seg.first_slot; t <= seg.last_slot; ++t) {
        eq.allocation[seg.agents[a]][t - 1] = part[a][t - seg.first_slot];
      }
    }
    p_low = seg.slot_prices.front();
    upper = seg.first_slot;
    std::erase_if(remaining, [&](int i) {
      return std::binary_search(seg.agents.begin(), seg.agents.end(), i);
    });
    eq.segments.push_back(std::move(seg));
  }
  return eq;
}

namespace {

int SegmentOf(const SchedulingEquilibrium& eq, int agent) {
  for (size_t k = 0; k < eq.segments.size(); ++k) {
    const auto& a = eq.segments[k].agents;
    if (std::binary_search(a.begin(), a.end(), agent)) return static_cast<int>(k);
  }
  throw Error(ErrorCode::kDimensionMismatch,
              "agent " + std::to_string(agent + 1) + " in no segment");
}

}  // namespace

bool IsMarginal(const SchedulingEquilibrium& eq, const SchedulingInput& in,
                int agent) {
  const SchedulingSegment& seg = eq.segments[SegmentOf(eq, agent)];
  const int r = in.requirements[agent];
  for (size_t t = 0; t < eq.allocation[agent].size(); ++t) {
    const int slot = static_cast<int>(t) + 1;
    const bool latest = slot > seg.last_slot - r && slot <= seg.last_slot;
    if (eq.allocation[agent][t] != (latest ? 1 : 0)) return false;
  }
  return true;
}

Rational MarginalPayment(const SchedulingInput& in,
                         const SchedulingEquilibrium& eq, int agent) {
  if (!IsMarginal(eq, in, agent)) {
    throw Error(ErrorCode::kNotMarginal, "agent " + std::to_string(agent + 1));
  }
  const int own = SegmentOf(eq, agent);
  const int n = static_cast<int>(in.budgets.size());
  std::vector<bool> done(n, false);
  Rational payment = 0;
  Rational p_low = 0;
  for (int g = 0; g < own; ++g) {
    const SchedulingSegment& seg = eq.segments[g];
    // Other agents still unassigned when segment g was chosen.
    std::vector<int> others;
    for (int i = 0; i < n; ++i) {
      if (!done[i] && i != agent) others.push_back(i);
    }
    // Declaring m' keeps segment g iff every set S containing the agent has
    // lambda_S(m') > lambda_g; the largest root of these bounds is the
    // infimum.
    const SubsetMask count = SubsetMask{1} << others.size();
    for (SubsetMask s = 0; s < count; ++s) {
      Rational money = 0;
      long slots = in.requirements[agent];
      for (int k : MaskElements(s)) {
        money += in.budgets[others[k]];
        slots += in.requirements[others[k]];
      }
      Rational bound = seg.lambda * Rational(slots * (slots + 1)) / 2 +
                       p_low * slots - money;
      payment = std::max(payment, bound);
    }
    for (int i : seg.agents) done[i] = true;
    p_low = seg.slot_prices.front();
  }
  return payment;
}

Equilibrium ToEquilibrium(const SchedulingEquilibrium& eq, int num_agents) {
  Equilibrium out;
  out.prices = eq.prices;
  out.allocation = eq.allocation;
  out.lambda.assign(num_agents, Rational(0));
  for (const SchedulingSegment& seg : eq.segments) {
    for (int i : seg.agents) out.lambda[i] = seg.lambda;
    out.segments.push_back({seg.agents, seg.lambda});
  }
  return out;
}

}  // namespace cfm
