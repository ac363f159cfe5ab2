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

// Equilibrium computation for markets satisfying extensibility.
//
// Agents are split into segments that share a common parameter lambda. Each
// round raises lambda on the still-active agents until some subset's
// delay-maximizing allocation exactly exhausts its budget at the current
// valid dual prices, freezes that subset, and repeats. A final feasibility
// program picks an allocation on which every agent spends exactly its budget.

#ifndef CFM_GENERAL_SOLVER_H_
#define CFM_GENERAL_SOLVER_H_

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cfm/lp.h"
#include "cfm/market.h"
#include "cfm/rational.h"
#include "cfm/submodular.h"

namespace cfm {

struct GeneralOptions {
  int max_search_steps = 200;
  int max_doublings = 256;
  int max_epsilon_halvings = 64;
};

struct ProbeRecord {
  Rational a;
  Rational g;
  std::vector<int> minimizer;
};

// One NextSeg call.
struct NextSegRecord {
  Rational g0;
  std::vector<ProbeRecord> probes;
  std::vector<int> segment;
  Rational a_star;
  Rational lambda;
  Rational epsilon;
  int search_steps = 0;
};

struct GeneralTrace {
  std::vector<NextSegRecord> calls;
};

std::string WriteTrace(const MarketInstance& instance, const GeneralTrace& trace);
GeneralTrace ParseTrace(std::string_view text, const MarketInstance& instance);

struct FrozenGroup {
  std::vector<int> agents;
  Rational lambda;
};

struct ValidDual {
  std::vector<std::vector<Rational>> alpha;  // per agent, per covering row
  PriceVector prices;
};

// State of the outer loop between NextSeg calls.
class SolverContext {
 public:
  explicit SolverContext(const MarketInstance& instance);

  const MarketInstance& instance() const { return instance_; }
  const std::vector<FrozenGroup>& frozen() const { return frozen_; }
  const std::vector<int>& active() const { return active_; }
  const std::vector<Rational>& lambda() const { return lambda_; }
  const PriceVector& prices() const { return prices_; }
  const std::vector<std::vector<Rational>>& alpha() const { return alpha_; }
  const Allocation& reference_allocation() const { return x_cur_; }

  // lambda^cur + a on the active agents.
  std::vector<Rational> LambdaAt(const Rational& a) const;

  // Dual-optimal (alpha, p) for LP(lambda^a) that keeps frozen duals, never
  // lowers a price and keeps prices of goods held by frozen agents. Among
  // those, total price is maximized.
  const ValidDual& DualAt(const Rational& a);

  // An LP(lambda^a) optimum maximizing the delay of the active subset.
  const Allocation& DelayMaximizer(SubsetMask subset);

  // m(S) - pay_S at parameter a.
  Rational F(const Rational& a, SubsetMask subset);
  MinimizeResult MinF(const Rational& a);

  std::vector<int> Agents(SubsetMask subset) const;
  SubsetMask Mask(const std::vector<int>& agents) const;

  // Freezes the active subset at parameter a, then shifts the remaining
  // active agents by epsilon with the corresponding valid prices.
  void Freeze(SubsetMask subset, const Rational& a);
  void Shift(const Rational& epsilon);

  // Whether the subset conditions hold for the active agents at parameter a
  // and every frozen group still spends exactly its budget.
  bool Certify(const Rational& a);

  int evaluations() const { return evaluations_; }

 private:
  void RebuildStages();

  const MarketInstance& instance_;
  // LP column of x_ij, -1 where the agent never holds the good.
  std::vector<std::vector<int>> var_;
  std::vector<FrozenGroup> frozen_;
  std::vector<int> active_;
  std::vector<Rational> lambda_;
  PriceVector prices_;
  std::vector<std::vector<Rational>> alpha_;
  Allocation x_cur_;
  // Stage groups in decreasing lambda order and their optimal delays.
  std::vector<std::vector<int>> stage_groups_;
  std::vector<Rational> stage_values_;
  // Optimal face of the stagewise program, prepared once per stage order.
  std::unique_ptr<lp::PreparedProgram> face_;
  std::map<SubsetMask, Allocation> maximizers_;
  std::map<Rational, ValidDual> duals_;
  int evaluations_ = 0;
};

// Exact a in [lo, hi] with F(a, subset) = 0; requires F(lo) > 0 >= F(hi).
Rational FindZeroA(SolverContext& ctx, SubsetMask subset, Rational lo,
                   Rational hi, const GeneralOptions& options, int* steps);

// Epsilon for separating the remaining active agents after a freeze.
Rational ComputeEpsilon(SolverContext& ctx, const GeneralOptions& options);

// One NextSeg call: finds, freezes and separates the next segment.
NextSegRecord NextSegment(SolverContext& ctx, bool first_call,
                          const GeneralOptions& options);

struct GeneralEquilibrium {
  PriceVector prices;
  Allocation allocation;
  std::vector<Rational> lambda;
  std::vector<std::vector<Rational>> alpha;
  std::vector<Segment> segments;
  GeneralTrace trace;
};

GeneralEquilibrium SolveGeneral(const MarketInstance& instance,
                                const GeneralOptions& options = {});

// Rebuilds the equilibrium from recorded segment decisions without search.
// Throws kTraceMismatch if a recorded decision does not hold.
GeneralEquilibrium ReplayTrace(const MarketInstance& instance,
                               const GeneralTrace& trace);

// LP(lambda): min sum_i lambda_i delay_i(x) s.t. covering and supply.
// Returns the optimal value.
Rational ParamLpValue(const MarketInstance& instance,
                      const std::vector<Rational>& lambda);

// Lexicographic optimum: total delay of the highest-lambda group first,
// then the next group, and so on.
Allocation StagewiseOptimal(const MarketInstance& instance,
                            const std::vector<Rational>& lambda);

Equilibrium ToEquilibrium(const GeneralEquilibrium& eq);

}  // namespace cfm

#endif  // CFM_GENERAL_SOLVER_H_
