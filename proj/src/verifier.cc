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

#include "cfm/verifier.h"

#include <sstream>

#include "cfm/error.h"
#include "cfm/scheduling.h"

namespace cfm {

bool VerificationReport::pass() const {
  for (const CheckResult& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

bool VerificationReport::Failed(const std::string& check) const {
  for (const CheckResult& c : checks) {
    if (!c.pass && c.check == check) return true;
  }
  return false;
}

std::vector<std::string> VerificationReport::FailedChecks() const {
  std::vector<std::string> out;
  for (const CheckResult& c : checks) {
    if (c.pass) continue;
    bool seen = false;
    for (const std::string& s : out) seen = seen || s == c.check;
    if (!seen) out.push_back(c.check);
  }
  return out;
}

std::string VerificationReport::ToText() const {
  std::ostringstream out;
  for (const CheckResult& c : checks) {
    out << (c.pass ? "pass " : "FAIL ") << c.check << " " << c.subject;
    if (!c.witness.empty()) out << " : " << c.witness;
    out << "\n";
  }
  out << (pass() ? "equilibrium verified\n" : "equilibrium rejected\n");
  return out.str();
}

namespace {

void CheckDimensions(const MarketInstance& instance,
                     const Allocation& allocation, const PriceVector& prices) {
  const size_t m = instance.goods.size();
  bool ok = prices.size() == m && allocation.size() == instance.agents.size();
  for (const auto& row : allocation) ok = ok && row.size() == m;
  if (!ok) throw Error(ErrorCode::kDimensionMismatch, "allocation or prices");
}

// Adds CC(agent) over variables base..base+m-1.
void AddCover(lp::LinearProgram& prog, const Agent& a, int base) {
  for (const CoverRow& row : a.cover) {
    std::vector<lp::Term> terms;
    for (size_t j = 0; j < row.coef.size(); ++j) {
      if (sgn(row.coef[j]) != 0) terms.push_back({base + static_cast<int>(j), row.coef[j]});
    }
    if (terms.empty()) {
      // 0 >= rhs; keep the row so infeasibility surfaces.
      terms.push_back({base, 0});
    }
    prog.AddConstraint(terms, lp::Relation::kGreaterEqual, row.rhs);
  }
}

std::vector<lp::Term> DelayTerms(const Agent& a, int base) {
  std::vector<lp::Term> terms;
  for (size_t j = 0; j < a.delays.size(); ++j) {
    if (sgn(a.delays[j]) != 0) terms.push_back({base + static_cast<int>(j), a.delays[j]});
  }
  return terms;
}

bool SatisfiesCover(const Agent& a, const std::vector<Rational>& bundle,
                    std::string* witness) {
  for (size_t k = 0; k < a.cover.size(); ++k) {
    Rational lhs = 0;
    for (size_t j = 0; j < bundle.size(); ++j) lhs += a.cover[k].coef[j] * bundle[j];
    if (lhs < a.cover[k].rhs) {
      if (witness) {
        *witness = "row " + std::to_string(k + 1) + ": " + ToString(lhs) +
                   " < " + ToString(a.cover[k].rhs);
      }
      return false;
    }
  }
  return true;
}

}  // namespace

OptimalBundle SolveOptimalBundle(const MarketInstance& instance, int agent,
                                 const PriceVector& prices) {
  const Agent& a = instance.agents[agent];
  const int m = instance.num_goods();
  lp::LinearProgram prog;
  for (int j = 0; j < m; ++j) prog.AddVariable();
  AddCover(prog, a, 0);
  std::vector<lp::Term> spend;
  for (int j = 0; j < m; ++j) {
    if (sgn(prices[j]) != 0) spend.push_back({j, prices[j]});
  }
  const bool has_budget_row = !spend.empty();
  if (has_budget_row) {
    prog.AddConstraint(spend, lp::Relation::kLessEqual, a.budget);
  }
  prog.SetObjective(DelayTerms(a, 0), lp::Sense::kMinimize);
  lp::LpSolution sol = lp::Solve(prog);
  OptimalBundle out;
  out.status = sol.status;
  if (sol.status != lp::Status::kOptimal) return out;
  out.delay = sol.objective;
  out.bundle = sol.values;
  const size_t rows = a.cover.size();
  out.dual.beta.assign(sol.duals.begin(), sol.duals.begin() + rows);
  out.dual.gamma = has_budget_row ? Rational(-sol.duals[rows]) : Rational(0);
  return out;
}

VerificationReport VerifyEquilibrium(const MarketInstance& instance,
                                     const Allocation& x,
                                     const PriceVector& prices) {
  CheckDimensions(instance, x, prices);
  VerificationReport report;
  const int n = instance.num_agents();
  const int m = instance.num_goods();
  for (int j = 0; j < m; ++j) {
    if (sgn(prices[j]) < 0) {
      report.checks.push_back({kCheckPrice, instance.goods[j].id, false,
                               "negative price " + ToString(prices[j])});
    }
  }
  for (int i = 0; i < n; ++i) {
    const Agent& a = instance.agents[i];
    CheckResult cover{kCheckCovering, a.id, true, ""};
    for (int j = 0; j < m; ++j) {
      if (sgn(x[i][j]) < 0) {
        cover.pass = false;
        cover.witness = "negative entry at " + instance.goods[j].id;
      }
    }
    if (cover.pass) cover.pass = SatisfiesCover(a, x[i], &cover.witness);
    report.checks.push_back(cover);

    const Rational spent = PaymentOf(prices, x[i]);
    report.checks.push_back({kCheckBudget, a.id, spent <= a.budget,
                             "spends " + ToString(spent) + " of " +
                                 ToString(a.budget)});

    const Rational held = DelayOf(instance, i, x[i]);
    OptimalBundle best = SolveOptimalBundle(instance, i, prices);
    if (best.status != lp::Status::kOptimal) {
      report.checks.push_back({kCheckOptimalBundle, a.id, false,
                               std::string("optimal-bundle program ") +
                                   lp::StatusName(best.status)});
    } else {
      // A bundle that breaks covering or budget is reported there; here the
      // delay must match the optimum exactly.
      report.checks.push_back({kCheckOptimalBundle, a.id, held <= best.delay,
                               "delay " + ToString(held) + ", optimum " +
                                   ToString(best.delay)});
    }
  }
  for (int j = 0; j < m; ++j) {
    Rational sold = 0;
    for (int i = 0; i < n; ++i) sold += x[i][j];
    report.checks.push_back({kCheckSupply, instance.goods[j].id, sold <= 1,
                             "sold " + ToString(sold)});
    const bool clears = sgn(prices[j]) <= 0 || sold == 1;
    report.checks.push_back({kCheckClearing, instance.goods[j].id, clears,
                             "price " + ToString(prices[j]) + ", sold " +
                                 ToString(sold)});
  }
  return report;
}

PriceVerdict CheckPriceEquilibrium(const MarketInstance& instance,
                                   const PriceVector& prices) {
  const int n = instance.num_agents();
  const int m = instance.num_goods();
  if (static_cast<int>(prices.size()) != m) {
    throw Error(ErrorCode::kDimensionMismatch, "price vector length");
  }
  PriceVerdict out;
  for (int j = 0; j < m; ++j) {
    if (sgn(prices[j]) < 0) {
      out.reason = "negative price at " + instance.goods[j].id;
      return out;
    }
  }
  lp::LinearProgram prog;
  for (int v = 0; v < n * m; ++v) prog.AddVariable();
  for (int i = 0; i < n; ++i) {
    const Agent& a = instance.agents[i];
    OptimalBundle best = SolveOptimalBundle(instance, i, prices);
    if (best.status != lp::Status::kOptimal) {
      out.reason = "agent " + a.id + " has no optimal bundle";
      return out;
    }
    AddCover(prog, a, i * m);
    std::vector<lp::Term> delay = DelayTerms(a, i * m);
    if (!delay.empty()) {
      prog.AddConstraint(delay, lp::Relation::kEqual, best.delay);
    }
    std::vector<lp::Term> spend;
    for (int j = 0; j < m; ++j) {
      if (sgn(prices[j]) != 0) spend.push_back({i * m + j, prices[j]});
    }
    if (!spend.empty()) {
      prog.AddConstraint(spend, lp::Relation::kLessEqual, a.budget);
    }
  }
  for (int j = 0; j < m; ++j) {
    std::vector<lp::Term> supply;
    for (int i = 0; i < n; ++i) supply.push_back({i * m + j, 1});
    prog.AddConstraint(supply,
                       sgn(prices[j]) > 0 ? lp::Relation::kEqual
                                          : lp::Relation::kLessEqual,
                       1);
  }
  auto point = lp::SolveFeasibility(prog);
  if (!point) {
    out.reason = "no supporting allocation";
    return out;
  }
  out.equilibrium = true;
  Allocation x = ZeroAllocation(instance);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) x[i][j] = (*point)[i * m + j];
  out.allocation = std::move(x);
  return out;
}

PropertyVerdict CheckPareto(const MarketInstance& instance,
                            const Allocation& allocation) {
  const int n = instance.num_agents();
  const int m = instance.num_goods();
  lp::LinearProgram prog;
  for (int v = 0; v < n * m; ++v) prog.AddVariable();
  lp::Objective total{{}, lp::Sense::kMinimize};
  Rational current = 0;
  for (int i = 0; i < n; ++i) {
    const Agent& a = instance.agents[i];
    AddCover(prog, a, i * m);
    std::vector<lp::Term> delay = DelayTerms(a, i * m);
    const Rational held = DelayOf(instance, i, allocation[i]);
    current += held;
    if (!delay.empty()) {
      prog.AddConstraint(delay, lp::Relation::kLessEqual, held);
      total.terms.insert(total.terms.end(), delay.begin(), delay.end());
    }
  }
  for (int j = 0; j < m; ++j) {
    std::vector<lp::Term> supply;
    for (int i = 0; i < n; ++i) supply.push_back({i * m + j, 1});
    prog.AddConstraint(supply, lp::Relation::kLessEqual, 1);
  }
  prog.SetObjective(total);
  lp::LpSolution sol = lp::Solve(prog);
  PropertyVerdict out;
  if (sol.status != lp::Status::kOptimal) {
    out.pass = false;
    out.witness = std::string("dominance program ") + lp::StatusName(sol.status);
    return out;
  }
  const Rational gain = current - sol.objective;
  if (sgn(gain) > 0) {
    out.pass = false;
    std::ostringstream w;
    w << "total delay can drop by " << ToString(gain) << "; improved agents:";
    for (int i = 0; i < n; ++i) {
      std::vector<Rational> bundle(sol.values.begin() + i * m,
                                   sol.values.begin() + (i + 1) * m);
      if (DelayOf(instance, i, bundle) < DelayOf(instance, i, allocation[i])) {
        w << " " << instance.agents[i].id;
      }
    }
    out.witness = w.str();
  }
  return out;
}

PropertyVerdict CheckEnvyFree(const MarketInstance& instance,
                              const Allocation& allocation,
                              const PriceVector& prices) {
  const int n = instance.num_agents();
  PropertyVerdict out;
  for (int i = 0; i < n; ++i) {
    const Agent& a = instance.agents[i];
    const Rational own = DelayOf(instance, i, allocation[i]);
    for (int k = 0; k < n; ++k) {
      if (k == i) continue;
      const std::vector<Rational>& other = allocation[k];
      if (!SatisfiesCover(a, other, nullptr)) continue;
      if (PaymentOf(prices, other) > a.budget) continue;
      if (DelayOf(instance, i, other) < own) {
        out.pass = false;
        out.witness = "agent " + a.id + " envies agent " +
                      instance.agents[k].id;
        return out;
      }
    }
  }
  return out;
}

std::optional<Rational> DominatedDelay(const MarketInstance& instance,
                                       int agent,
                                       const std::vector<Rational>& held) {
  const Agent& a = instance.agents[agent];
  const int m = instance.num_goods();
  lp::LinearProgram prog;
  for (int j = 0; j < m; ++j) prog.AddVariable("", Rational(0), held[j]);
  AddCover(prog, a, 0);
  prog.SetObjective(DelayTerms(a, 0), lp::Sense::kMinimize);
  lp::LpSolution sol = lp::Solve(prog);
  if (sol.status != lp::Status::kOptimal) return std::nullopt;
  return sol.objective;
}

PropertyVerdict CheckSharingIncentive(const MarketInstance& instance,
                                      const Allocation& allocation) {
  Rational money = 0;
  for (const Agent& a : instance.agents) money += a.budget;
  PropertyVerdict out;
  for (int i = 0; i < instance.num_agents(); ++i) {
    const Agent& a = instance.agents[i];
    std::vector<Rational> share(instance.num_goods(), a.budget / money);
    std::optional<Rational> share_delay = DominatedDelay(instance, i, share);
    if (!share_delay) continue;  // the share covers nothing: infinite delay
    const Rational held = DelayOf(instance, i, allocation[i]);
    if (held > *share_delay) {
      out.pass = false;
      out.witness = "agent " + a.id + " delay " + ToString(held) +
                    " exceeds proportional-share delay " +
                    ToString(*share_delay);
      return out;
    }
  }
  return out;
}

PropertyVerdict CheckBudgetExhaustion(const MarketInstance& instance,
                                      const Allocation& allocation,
                                      const PriceVector& prices) {
  PropertyVerdict out;
  for (int i = 0; i < instance.num_agents(); ++i) {
    const Rational spent = PaymentOf(prices, allocation[i]);
    if (spent != instance.agents[i].budget) {
      out.pass = false;
      out.witness = "agent " + instance.agents[i].id + " spends " +
                    ToString(spent) + " of " +
                    ToString(instance.agents[i].budget);
      return out;
    }
  }
  return out;
}

IcOutcome IcExperiment(const MarketInstance& instance, int agent,
                       const Rational& reported_budget,
                       int reported_requirement) {
  std::optional<SingleMachineView> view = AsSingleMachine(instance);
  if (!view) throw Error(ErrorCode::kNotSchedulingInstance, instance.name);
  if (agent < 0 || agent >= instance.num_agents()) {
    throw Error(ErrorCode::kDimensionMismatch, "agent index");
  }
  if (sgn(reported_budget) <= 0 || reported_budget > view->budgets[agent] ||
      reported_requirement < view->requirements[agent]) {
    throw Error(ErrorCode::kSemanticError,
                "misreport: budget may only drop and requirement only rise");
  }
  SchedulingInput truthful{view->budgets, view->requirements};
  SchedulingInput lie = truthful;
  lie.budgets[agent] = reported_budget;
  lie.requirements[agent] = reported_requirement;
  SchedulingEquilibrium honest = SolveScheduling(truthful, view->spare_slots);
  SchedulingEquilibrium dishonest = SolveScheduling(lie, view->spare_slots);

  // The agent's true delay under misreport: best sub-bundle covering its
  // true requirement within what it was given.
  MarketInstance after =
      BuildSingleMachine(lie.budgets, truthful.requirements,
                         static_cast<int>(dishonest.prices.size()) -
                             [&] {
                               int s = 0;
                               for (int r : truthful.requirements) s += r;
                               return s;
                             }());
  IcOutcome out;
  out.truthful_delay = DelayOf(instance, agent, honest.allocation[agent]);
  std::optional<Rational> d =
      DominatedDelay(after, agent, dishonest.allocation[agent]);
  if (!d) {
    throw Error(ErrorCode::kFeasibilityLpInfeasible,
                "misreport outcome covers no true requirement");
  }
  out.misreport_delay = *d;
  return out;
}

}  // namespace cfm
