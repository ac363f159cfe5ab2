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

// Independent certification of equilibria and of the fairness and incentive
// properties. Nothing here looks at solver internals; every check re-solves
// its own linear programs from the instance data.

#ifndef CFM_VERIFIER_H_
#define CFM_VERIFIER_H_

#include <optional>
#include <string>
#include <vector>

#include "cfm/lp.h"
#include "cfm/market.h"

namespace cfm {

// Names of the sub-checks in a VerificationReport.
inline constexpr const char* kCheckPrice = "price";
inline constexpr const char* kCheckCovering = "covering";
inline constexpr const char* kCheckBudget = "budget";
inline constexpr const char* kCheckOptimalBundle = "optimal_bundle";
inline constexpr const char* kCheckSupply = "supply";
inline constexpr const char* kCheckClearing = "clearing";

struct CheckResult {
  std::string check;
  std::string subject;  // agent or good id
  bool pass = true;
  std::string witness;
};

struct VerificationReport {
  std::vector<CheckResult> checks;

  bool pass() const;
  // True when some instance of the named sub-check failed.
  bool Failed(const std::string& check) const;
  std::vector<std::string> FailedChecks() const;
  std::string ToText() const;
};

// Dual of an agent's optimal-bundle program: beta per covering row and gamma
// for the budget row.
struct ObLpDual {
  std::vector<Rational> beta;
  Rational gamma;
};

struct OptimalBundle {
  lp::Status status = lp::Status::kInfeasible;
  Rational delay;
  std::vector<Rational> bundle;
  ObLpDual dual;
};

// min delay_i(x) s.t. CC(i), p.x <= m_i, x >= 0.
OptimalBundle SolveOptimalBundle(const MarketInstance& instance, int agent,
                                 const PriceVector& prices);

VerificationReport VerifyEquilibrium(const MarketInstance& instance,
                                     const Allocation& allocation,
                                     const PriceVector& prices);

struct PriceVerdict {
  bool equilibrium = false;
  std::optional<Allocation> allocation;
  std::string reason;
};

// Whether some allocation supports the prices as an equilibrium.
PriceVerdict CheckPriceEquilibrium(const MarketInstance& instance,
                                   const PriceVector& prices);

struct PropertyVerdict {
  bool pass = true;
  std::string witness;
};

PropertyVerdict CheckPareto(const MarketInstance& instance,
                            const Allocation& allocation);
PropertyVerdict CheckEnvyFree(const MarketInstance& instance,
                              const Allocation& allocation,
                              const PriceVector& prices);
PropertyVerdict CheckSharingIncentive(const MarketInstance& instance,
                                      const Allocation& allocation);
// Sum_j p_j x_ij = m_i for every agent.
PropertyVerdict CheckBudgetExhaustion(const MarketInstance& instance,
                                      const Allocation& allocation,
                                      const PriceVector& prices);

// Least delay of a bundle dominated by `held` that satisfies CC(agent);
// nullopt when none exists.
std::optional<Rational> DominatedDelay(const MarketInstance& instance,
                                       int agent,
                                       const std::vector<Rational>& held);

struct IcOutcome {
  Rational truthful_delay;
  Rational misreport_delay;
};

// Runs the scheduling solver on the truthful and the misreported data and
// measures the agent's true delay in both outcomes.
IcOutcome IcExperiment(const MarketInstance& instance, int agent,
                       const Rational& reported_budget,
                       int reported_requirement);

}  // namespace cfm

#endif  // CFM_VERIFIER_H_
