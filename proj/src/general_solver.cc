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

#include "cfm/general_solver.h"

#include <algorithm>
#include <sstream>

#include "cfm/error.h"
#include "cfm/lp.h"

namespace cfm {
namespace {

// Column of x_ij, or -1 when agent i has no use for good j: no covering
// row mentions it and it has positive delay, so it is zero at every
// stagewise optimum.
using VarIndex = std::vector<std::vector<int>>;

VarIndex IndexVariables(const MarketInstance& instance) {
  const int m = instance.num_goods();
  VarIndex var(instance.num_agents(), std::vector<int>(m, -1));
  int next = 0;
  for (int i = 0; i < instance.num_agents(); ++i) {
    const Agent& a = instance.agents[i];
    for (int j = 0; j < m; ++j) {
      bool used = sgn(a.delays[j]) == 0;
      for (const CoverRow& row : a.cover) used = used || sgn(row.coef[j]) != 0;
      if (used) var[i][j] = next++;
    }
  }
  return var;
}

// Covering and supply rows over the indexed variables.
lp::LinearProgram BaseProgram(const MarketInstance& instance,
                              const VarIndex& var) {
  const int n = instance.num_agents();
  const int m = instance.num_goods();
  lp::LinearProgram prog;
  for (const auto& row : var)
    for (int v : row)
      if (v >= 0) prog.AddVariable();
  for (int i = 0; i < n; ++i) {
    for (const CoverRow& row : instance.agents[i].cover) {
      std::vector<lp::Term> terms;
      for (int j = 0; j < m; ++j) {
        if (sgn(row.coef[j]) != 0) terms.push_back({var[i][j], row.coef[j]});
      }
      if (terms.empty()) {
        if (sgn(row.rhs) <= 0) continue;
        throw Error(ErrorCode::kStageLpInfeasible,
                    "agent " + instance.agents[i].id + " cannot be covered");
      }
      prog.AddConstraint(terms, lp::Relation::kGreaterEqual, row.rhs);
    }
  }
  for (int j = 0; j < m; ++j) {
    std::vector<lp::Term> supply;
    for (int i = 0; i < n; ++i) {
      if (var[i][j] >= 0) supply.push_back({var[i][j], 1});
    }
    if (!supply.empty()) {
      prog.AddConstraint(supply, lp::Relation::kLessEqual, 1);
    }
  }
  return prog;
}

std::vector<lp::Term> GroupDelay(const MarketInstance& instance,
                                 const VarIndex& var,
                                 const std::vector<int>& group) {
  const int m = instance.num_goods();
  std::vector<lp::Term> terms;
  for (int i : group) {
    for (int j = 0; j < m; ++j) {
      const Rational& d = instance.agents[i].delays[j];
      if (sgn(d) != 0 && var[i][j] >= 0) terms.push_back({var[i][j], d});
    }
  }
  return terms;
}

Allocation Unflatten(const MarketInstance& instance, const VarIndex& var,
                     const std::vector<Rational>& values) {
  Allocation x = ZeroAllocation(instance);
  for (int i = 0; i < instance.num_agents(); ++i)
    for (int j = 0; j < instance.num_goods(); ++j)
      if (var[i][j] >= 0) x[i][j] = values[var[i][j]];
  return x;
}

std::string AgentList(const MarketInstance& instance,
                      const std::vector<int>& agents) {
  std::string out;
  for (int i : agents) {
    if (!out.empty()) out += " ";
    out += instance.agents[i].id;
  }
  return out;
}

// Lexicographic minimization of group delays, groups given top first.
lp::LpSolution Stagewise(const MarketInstance& instance, const VarIndex& var,
                         const std::vector<std::vector<int>>& groups) {
  std::vector<lp::Objective> stages;
  for (const auto& g : groups) {
    stages.push_back({GroupDelay(instance, var, g), lp::Sense::kMinimize});
  }
  if (stages.empty()) stages.push_back({{}, lp::Sense::kMinimize});
  lp::LpSolution sol = lp::SolveLexicographic(BaseProgram(instance, var), stages);
  if (sol.status != lp::Status::kOptimal) {
    throw Error(ErrorCode::kStageLpInfeasible,
                std::string("stagewise program ") + lp::StatusName(sol.status));
  }
  return sol;
}

}  // namespace

Rational ParamLpValue(const MarketInstance& instance,
                      const std::vector<Rational>& lambda) {
  const VarIndex var = IndexVariables(instance);
  lp::LinearProgram prog = BaseProgram(instance, var);
  std::vector<lp::Term> obj;
  const int m = instance.num_goods();
  for (int i = 0; i < instance.num_agents(); ++i) {
    for (int j = 0; j < m; ++j) {
      Rational c = lambda[i] * instance.agents[i].delays[j];
      if (sgn(c) != 0 && var[i][j] >= 0) obj.push_back({var[i][j], c});
    }
  }
  prog.SetObjective(obj, lp::Sense::kMinimize);
  lp::LpSolution sol = lp::Solve(prog);
  if (sol.status != lp::Status::kOptimal) {
    throw Error(ErrorCode::kStageLpInfeasible,
                std::string("LP(lambda) ") + lp::StatusName(sol.status));
  }
  return sol.objective;
}

Allocation StagewiseOptimal(const MarketInstance& instance,
                            const std::vector<Rational>& lambda) {
  std::vector<Rational> levels(lambda.begin(), lambda.end());
  std::sort(levels.begin(), levels.end(), std::greater<>());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  std::vector<std::vector<int>> groups;
  for (const Rational& level : levels) {
    std::vector<int> g;
    for (int i = 0; i < instance.num_agents(); ++i) {
      if (lambda[i] == level) g.push_back(i);
    }
    groups.push_back(g);
  }
  const VarIndex var = IndexVariables(instance);
  return Unflatten(instance, var, Stagewise(instance, var, groups).values);
}

SolverContext::SolverContext(const MarketInstance& instance)
    : instance_(instance), var_(IndexVariables(instance)) {
  const int n = instance.num_agents();
  for (int i = 0; i < n; ++i) active_.push_back(i);
  lambda_.assign(n, Rational(0));
  prices_.assign(instance.num_goods(), Rational(0));
  for (const Agent& a : instance.agents) {
    alpha_.push_back(std::vector<Rational>(a.cover.size()));
  }
  RebuildStages();
}

void SolverContext::RebuildStages() {
  stage_groups_.clear();
  if (!active_.empty()) stage_groups_.push_back(active_);
  for (auto it = frozen_.rbegin(); it != frozen_.rend(); ++it) {
    stage_groups_.push_back(it->agents);
  }
  lp::LpSolution sol = Stagewise(instance_, var_, stage_groups_);
  x_cur_ = Unflatten(instance_, var_, sol.values);
  stage_values_.clear();
  for (const auto& g : stage_groups_) {
    stage_values_.push_back(lp::Evaluate(GroupDelay(instance_, var_, g), sol.values));
  }
  maximizers_.clear();
  face_.reset();
  duals_.clear();
}

std::vector<Rational> SolverContext::LambdaAt(const Rational& a) const {
  std::vector<Rational> out = lambda_;
  for (int i : active_) out[i] += a;
  return out;
}

std::vector<int> SolverContext::Agents(SubsetMask subset) const {
  std::vector<int> out;
  for (int k : MaskElements(subset)) out.push_back(active_[k]);
  return out;
}

SubsetMask SolverContext::Mask(const std::vector<int>& agents) const {
  SubsetMask mask = 0;
  for (int i : agents) {
    auto it = std::find(active_.begin(), active_.end(), i);
    if (it == active_.end()) {
      throw Error(ErrorCode::kTraceMismatch,
                  "agent " + instance_.agents[i].id + " is not active");
    }
    mask |= SubsetMask{1} << (it - active_.begin());
  }
  return mask;
}

const Allocation& SolverContext::DelayMaximizer(SubsetMask subset) {
  auto it = maximizers_.find(subset);
  if (it != maximizers_.end()) return it->second;
  if (!face_) {
    lp::LinearProgram prog = BaseProgram(instance_, var_);
    for (size_t g = 0; g < stage_groups_.size(); ++g) {
      std::vector<lp::Term> terms =
          GroupDelay(instance_, var_, stage_groups_[g]);
      if (!terms.empty()) {
        prog.AddConstraint(terms, lp::Relation::kEqual, stage_values_[g]);
      }
    }
    face_ = std::make_unique<lp::PreparedProgram>(prog);
  }
  lp::LpSolution sol = face_->Solve(
      {GroupDelay(instance_, var_, Agents(subset)), lp::Sense::kMaximize});
  if (sol.status != lp::Status::kOptimal) {
    throw Error(ErrorCode::kStageLpInfeasible,
                std::string("delay maximization ") + lp::StatusName(sol.status));
  }
  return maximizers_.emplace(subset, Unflatten(instance_, var_, sol.values))
      .first->second;
}

namespace {

// Shared by the valid-dual program and the zero-finding program. Variables:
// alpha for active agents' covering rows, then one price per good, then
// optionally the parameter a.
struct DualLayout {
  std::vector<std::vector<int>> alpha_var;  // -1 for frozen agents
  std::vector<int> price_var;
  int a_var = -1;
};

DualLayout BuildDualProgram(const MarketInstance& instance,
                            const std::vector<int>& active,
                            const std::vector<Rational>& lambda_cur,
                            const Rational* fixed_a, const Allocation& x_cur,
                            const PriceVector& p_cur,
                            const std::vector<std::vector<Rational>>& alpha_cur,
                            lp::LinearProgram& prog) {
  const int n = instance.num_agents();
  const int m = instance.num_goods();
  std::vector<bool> is_active(n, false);
  for (int i : active) is_active[i] = true;
  DualLayout layout;
  layout.alpha_var.resize(n);
  for (int i = 0; i < n; ++i) {
    const Agent& ag = instance.agents[i];
    layout.alpha_var[i].assign(ag.cover.size(), -1);
    if (!is_active[i]) continue;
    for (size_t k = 0; k < ag.cover.size(); ++k) {
      Rational lhs = 0;
      for (int j = 0; j < m; ++j) lhs += ag.cover[k].coef[j] * x_cur[i][j];
      // A slack covering row carries a zero dual.
      const bool slack = lhs > ag.cover[k].rhs;
      layout.alpha_var[i][k] = prog.AddVariable(
          "", Rational(0),
          slack ? std::optional<Rational>(Rational(0)) : std::nullopt);
    }
  }
  for (int j = 0; j < m; ++j) {
    Rational sold = 0;
    bool frozen_use = false;
    for (int i = 0; i < n; ++i) {
      sold += x_cur[i][j];
      if (!is_active[i] && sgn(x_cur[i][j]) > 0) frozen_use = true;
    }
    std::optional<Rational> upper;
    if (sold < 1) {
      if (sgn(p_cur[j]) > 0) {
        throw Error(ErrorCode::kValidDualInfeasible,
                    "priced good " + instance.goods[j].id + " not sold out");
      }
      upper = Rational(0);
    } else if (frozen_use) {
      upper = p_cur[j];
    }
    layout.price_var.push_back(prog.AddVariable("", p_cur[j], upper));
  }
  if (fixed_a == nullptr) layout.a_var = prog.AddVariable("a");
  for (int i = 0; i < n; ++i) {
    const Agent& ag = instance.agents[i];
    for (int j = 0; j < m; ++j) {
      // sum_k a_ijk alpha_ik - p_j <= lambda_i d_ij, tight where x > 0.
      std::vector<lp::Term> terms;
      Rational rhs = lambda_cur[i] * ag.delays[j];
      for (size_t k = 0; k < ag.cover.size(); ++k) {
        const Rational& c = ag.cover[k].coef[j];
        if (sgn(c) == 0) continue;
        if (is_active[i]) {
          terms.push_back({layout.alpha_var[i][k], c});
        } else {
          rhs -= c * alpha_cur[i][k];
        }
      }
      terms.push_back({layout.price_var[j], -1});
      if (is_active[i]) {
        if (fixed_a != nullptr) {
          rhs += *fixed_a * ag.delays[j];
        } else if (sgn(ag.delays[j]) != 0) {
          terms.push_back({layout.a_var, -ag.delays[j]});
        }
      }
      prog.AddConstraint(terms,
                         sgn(x_cur[i][j]) > 0 ? lp::Relation::kEqual
                                              : lp::Relation::kLessEqual,
                         rhs);
    }
  }
  return layout;
}

}  // namespace

const ValidDual& SolverContext::DualAt(const Rational& a) {
  auto it = duals_.find(a);
  if (it != duals_.end()) return it->second;
  lp::LinearProgram prog;
  DualLayout layout = BuildDualProgram(instance_, active_, lambda_, &a, x_cur_,
                                       prices_, alpha_, prog);
  std::vector<lp::Term> total;
  for (int v : layout.price_var) total.push_back({v, 1});
  prog.SetObjective(total, lp::Sense::kMaximize);
  lp::LpSolution sol = lp::Solve(prog);
  if (sol.status == lp::Status::kInfeasible) {
    throw Error(ErrorCode::kValidDualInfeasible, "at a = " + ToString(a));
  }
  if (sol.status == lp::Status::kUnbounded) {
    throw Error(ErrorCode::kValidDualUnbounded,
                "prices unbounded at a = " + ToString(a) +
                    "; no unsold good anchors them");
  }
  ValidDual dual;
  dual.alpha = alpha_;
  for (int i : active_) {
    for (size_t k = 0; k < layout.alpha_var[i].size(); ++k) {
      dual.alpha[i][k] = sol.values[layout.alpha_var[i][k]];
    }
  }
  for (int v : layout.price_var) dual.prices.push_back(sol.values[v]);
  return duals_.emplace(a, std::move(dual)).first->second;
}

Rational SolverContext::F(const Rational& a, SubsetMask subset) {
  ++evaluations_;
  const PriceVector& p = DualAt(a).prices;
  const Allocation& x = DelayMaximizer(subset);
  Rational surplus = 0;
  for (int i : Agents(subset)) {
    surplus += instance_.agents[i].budget - PaymentOf(p, x[i]);
  }
  return surplus;
}

MinimizeResult SolverContext::MinF(const Rational& a) {
  SetFunction f{static_cast<int>(active_.size()),
                [&](SubsetMask s) { return F(a, s); }};
  return Minimize(f);
}

void SolverContext::Freeze(SubsetMask subset, const Rational& a) {
  const ValidDual dual = DualAt(a);
  std::vector<int> agents = Agents(subset);
  const Rational level = lambda_[active_.front()] + a;
  for (int i : active_) {
    lambda_[i] += a;
    alpha_[i] = dual.alpha[i];
  }
  prices_ = dual.prices;
  frozen_.push_back({agents, level});
  std::erase_if(active_, [&](int i) {
    return std::find(agents.begin(), agents.end(), i) != agents.end();
  });
  RebuildStages();
}

void SolverContext::Shift(const Rational& epsilon) {
  if (active_.empty()) return;
  const ValidDual dual = DualAt(epsilon);
  for (int i : active_) {
    lambda_[i] += epsilon;
    alpha_[i] = dual.alpha[i];
  }
  prices_ = dual.prices;
  // The stage order is unchanged, so delay maximizers stay valid.
  duals_.clear();
}

bool SolverContext::Certify(const Rational& a) {
  try {
    const PriceVector& p = DualAt(a).prices;
    for (const FrozenGroup& g : frozen_) {
      Rational pay = 0, money = 0;
      for (int i : g.agents) {
        pay += PaymentOf(p, x_cur_[i]);
        money += instance_.agents[i].budget;
      }
      if (pay != money) return false;
    }
    if (!active_.empty() && sgn(MinF(a).value) < 0) return false;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kValidDualInfeasible ||
        e.code() == ErrorCode::kValidDualUnbounded) {
      return false;
    }
    throw;
  }
  return true;
}

namespace {

// Smallest a in [lo, hi] at which some dual of the current face pays
// exactly m(S) for the delay maximizer of S.
std::optional<Rational> ZeroCandidate(SolverContext& ctx, SubsetMask subset,
                                      const Rational& lo, const Rational& hi) {
  const MarketInstance& instance = ctx.instance();
  lp::LinearProgram prog;
  DualLayout layout = BuildDualProgram(
      instance, ctx.active(), ctx.lambda(), nullptr,
      ctx.reference_allocation(), ctx.prices(), ctx.alpha(), prog);
  const Allocation& x = ctx.DelayMaximizer(subset);
  std::vector<lp::Term> pay;
  Rational money = 0;
  for (int i : ctx.Agents(subset)) money += instance.agents[i].budget;
  for (int j = 0; j < instance.num_goods(); ++j) {
    Rational held = 0;
    for (int i : ctx.Agents(subset)) held += x[i][j];
    if (sgn(held) != 0) pay.push_back({layout.price_var[j], held});
  }
  if (pay.empty()) return std::nullopt;
  prog.AddConstraint(pay, lp::Relation::kEqual, money);
  prog.AddConstraint({{layout.a_var, 1}}, lp::Relation::kGreaterEqual, lo);
  prog.AddConstraint({{layout.a_var, 1}}, lp::Relation::kLessEqual, hi);
  prog.SetObjective({{layout.a_var, 1}}, lp::Sense::kMinimize);
  lp::LpSolution sol = lp::Solve(prog);
  if (sol.status != lp::Status::kOptimal) return std::nullopt;
  return sol.values[layout.a_var];
}

// Root of the line through two points, if it has negative slope.
std::optional<Rational> LineRoot(const Rational& a0, const Rational& f0,
                                 const Rational& a1, const Rational& f1) {
  if (a0 == a1 || f0 == f1) return std::nullopt;
  Rational slope = (f1 - f0) / (a1 - a0);
  if (sgn(slope) >= 0) return std::nullopt;
  return a0 - f0 / slope;
}

}  // namespace

Rational FindZeroA(SolverContext& ctx, SubsetMask subset, Rational lo,
                   Rational hi, const GeneralOptions& options, int* steps) {
  Rational f_lo = ctx.F(lo, subset);
  Rational f_hi = ctx.F(hi, subset);
  if (sgn(f_lo) <= 0 || sgn(f_hi) > 0) {
    throw Error(ErrorCode::kBracketExhausted, "bracket does not straddle zero");
  }
  if (sgn(f_hi) == 0 && hi == lo) return hi;
  // Recent evaluations on each side of the root, newest last.
  std::vector<std::pair<Rational, Rational>> left = {{lo, f_lo}};
  std::vector<std::pair<Rational, Rational>> right = {{hi, f_hi}};
  std::vector<Rational> candidates;
  if (auto c = ZeroCandidate(ctx, subset, lo, hi)) candidates.push_back(*c);
  int stalled = 0;
  for (int iter = 0; iter < options.max_search_steps; ++iter) {
    const Rational width = hi - lo;
    if (auto c = LineRoot(lo, f_lo, hi, f_hi)) candidates.push_back(*c);
    if (left.size() >= 2) {
      auto& [a0, f0] = left[left.size() - 2];
      if (auto c = LineRoot(a0, f0, lo, f_lo)) candidates.push_back(*c);
    }
    if (right.size() >= 2) {
      auto& [a0, f0] = right[right.size() - 2];
      if (auto c = LineRoot(a0, f0, hi, f_hi)) candidates.push_back(*c);
    }
    if (stalled >= 2) {
      candidates.push_back((lo + hi) / 2);
      stalled = 0;
    }
    for (const Rational& c : candidates) {
      if (c <= lo || c > hi) continue;
      if (steps) ++*steps;
      Rational v = ctx.F(c, subset);
      if (sgn(v) == 0) return c;
      if (sgn(v) > 0) {
        lo = c;
        f_lo = v;
        left.push_back({c, v});
      } else {
        hi = c;
        f_hi = v;
        right.push_back({c, v});
      }
    }
    candidates.clear();
    if (sgn(f_hi) == 0) {
      // Only the original hi is a root; probe inside the bracket.
      candidates.push_back((lo + hi) / 2);
    }
    if (2 * (hi - lo) > width) ++stalled;
  }
  throw Error(ErrorCode::kBracketExhausted,
              "no exact zero after " + std::to_string(options.max_search_steps) +
                  " steps");
}

Rational ComputeEpsilon(SolverContext& ctx, const GeneralOptions& options) {
  if (ctx.active().empty()) return 1;
  Rational eps = 1;
  for (int k = 0; k < options.max_epsilon_halvings; ++k) {
    if (ctx.Certify(eps)) return eps;
    eps /= 2;
  }
  throw Error(ErrorCode::kEpsilonNotFound,
              "after " + std::to_string(options.max_epsilon_halvings) +
                  " halvings");
}

NextSegRecord NextSegment(SolverContext& ctx, bool first_call,
                          const GeneralOptions& options) {
  if (ctx.active().empty()) throw Error(ErrorCode::kEmptySet, "no active agents");
  NextSegRecord rec;
  auto probe = [&](const Rational& a) {
    MinimizeResult r = ctx.MinF(a);
    rec.probes.push_back({a, r.value, ctx.Agents(r.minimizer)});
    return r;
  };
  MinimizeResult at_zero = probe(0);
  rec.g0 = at_zero.value;
  if (sgn(rec.g0) < 0) {
    throw Error(ErrorCode::kDegenerateInstance, "g(0) < 0");
  }
  Rational a_star = 0;
  if (sgn(rec.g0) == 0) {
    if (first_call) {
      throw Error(ErrorCode::kDegenerateInstance, "critical value 0 at start");
    }
  } else {
    Rational lo = 0;
    Rational hi = 1;
    MinimizeResult at_hi = probe(hi);
    for (int d = 0; sgn(at_hi.value) > 0; ++d) {
      if (d >= options.max_doublings) {
        throw Error(ErrorCode::kNoTightSet, "surplus stays positive");
      }
      lo = hi;
      hi *= 2;
      at_hi = probe(hi);
    }
    SubsetMask candidate = at_hi.minimizer;
    while (true) {
      if (rec.search_steps >= options.max_search_steps) {
        throw Error(ErrorCode::kBracketExhausted, "segment search");
      }
      ++rec.search_steps;
      Rational root = sgn(at_hi.value) == 0
                          ? hi
                          : FindZeroA(ctx, candidate, lo, hi, options,
                                      &rec.search_steps);
      MinimizeResult at_root = probe(root);
      if (sgn(at_root.value) == 0) {
        a_star = root;
        break;
      }
      hi = root;
      at_hi = at_root;
      candidate = at_root.minimizer;
    }
  }
  // Maximal minimizer: grow while a superset still has zero surplus.
  SubsetMask best = ctx.MinF(a_star).minimizer;
  while (true) {
    const SubsetMask base = best;
    SetFunction grown{static_cast<int>(ctx.active().size()),
                      [&](SubsetMask s) { return ctx.F(a_star, s | base); }};
    MinimizeResult r = Minimize(grown);
    const SubsetMask next = r.minimizer | base;
    if (next == base || sgn(r.value) > 0) break;
    best = next;
  }
  rec.segment = ctx.Agents(best);
  rec.a_star = a_star;
  rec.lambda = ctx.lambda()[ctx.active().front()] + a_star;
  ctx.Freeze(best, a_star);
  rec.epsilon = ComputeEpsilon(ctx, options);
  ctx.Shift(rec.epsilon);
  return rec;
}

namespace {

GeneralEquilibrium Finish(SolverContext& ctx, GeneralTrace trace) {
  const MarketInstance& instance = ctx.instance();
  const int n = instance.num_agents();
  const int m = instance.num_goods();
  GeneralEquilibrium eq;
  eq.lambda = ctx.lambda();
  eq.prices = ctx.prices();
  eq.alpha = ctx.alpha();
  for (const FrozenGroup& g : ctx.frozen()) {
    std::vector<int> agents = g.agents;
    std::sort(agents.begin(), agents.end());
    eq.segments.push_back({agents, g.lambda});
  }
  const VarIndex var = IndexVariables(instance);
  lp::LinearProgram prog = BaseProgram(instance, var);
  std::vector<lp::Term> weighted;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      Rational c = eq.lambda[i] * instance.agents[i].delays[j];
      if (sgn(c) != 0 && var[i][j] >= 0) weighted.push_back({var[i][j], c});
    }
  }
  if (!weighted.empty()) {
    prog.AddConstraint(weighted, lp::Relation::kEqual,
                       ParamLpValue(instance, eq.lambda), "optimality");
  }
  for (int i = 0; i < n; ++i) {
    std::vector<lp::Term> spend;
    for (int j = 0; j < m; ++j) {
      if (sgn(eq.prices[j]) != 0 && var[i][j] >= 0) {
        spend.push_back({var[i][j], eq.prices[j]});
      }
    }
    if (spend.empty()) {
      throw Error(ErrorCode::kFinalFeasibilityInfeasible,
                  "agent " + instance.agents[i].id + " faces only free goods");
    }
    prog.AddConstraint(spend, lp::Relation::kEqual, instance.agents[i].budget);
  }
  auto point = lp::SolveFeasibility(prog);
  if (!point) {
    throw Error(ErrorCode::kFinalFeasibilityInfeasible,
                "no budget-exact optimal allocation");
  }
  eq.allocation = Unflatten(instance, var, *point);
  eq.trace = std::move(trace);
  return eq;
}

}  // namespace

GeneralEquilibrium SolveGeneral(const MarketInstance& instance,
                                const GeneralOptions& options) {
  ValidateInstance(instance);
  SolverContext ctx(instance);
  GeneralTrace trace;
  bool first = true;
  while (!ctx.active().empty()) {
    trace.calls.push_back(NextSegment(ctx, first, options));
    first = false;
  }
  return Finish(ctx, std::move(trace));
}

GeneralEquilibrium ReplayTrace(const MarketInstance& instance,
                               const GeneralTrace& trace) {
  ValidateInstance(instance);
  SolverContext ctx(instance);
  for (const NextSegRecord& rec : trace.calls) {
    if (ctx.active().empty()) {
      throw Error(ErrorCode::kTraceMismatch, "more segments than agents");
    }
    const SubsetMask mask = ctx.Mask(rec.segment);
    if (rec.lambda != ctx.lambda()[ctx.active().front()] + rec.a_star) {
      throw Error(ErrorCode::kTraceMismatch,
                  "lambda " + ToString(rec.lambda) + " does not match a = " +
                      ToString(rec.a_star));
    }
    if (sgn(ctx.F(rec.a_star, mask)) != 0 ||
        sgn(ctx.MinF(rec.a_star).value) != 0) {
      throw Error(ErrorCode::kTraceMismatch,
                  "segment " + AgentList(instance, rec.segment) +
                      " is not tight at a = " + ToString(rec.a_star));
    }
    ctx.Freeze(mask, rec.a_star);
    if (!ctx.active().empty()) {
      if (!ctx.Certify(rec.epsilon)) {
        throw Error(ErrorCode::kTraceMismatch,
                    "epsilon " + ToString(rec.epsilon) + " fails certification");
      }
      ctx.Shift(rec.epsilon);
    }
  }
  if (!ctx.active().empty()) {
    throw Error(ErrorCode::kTraceMismatch, "trace leaves agents unassigned");
  }
  return Finish(ctx, trace);
}

std::string WriteTrace(const MarketInstance& instance,
                       const GeneralTrace& trace) {
  std::ostringstream out;
  for (size_t k = 0; k < trace.calls.size(); ++k) {
    const NextSegRecord& rec = trace.calls[k];
    out << "[nextseg " << k + 1 << "]\n";
    out << "g0 = " << ToString(rec.g0) << "\n";
    for (const ProbeRecord& p : rec.probes) {
      out << "probe = " << ToString(p.a) << " " << ToString(p.g) << " "
          << AgentList(instance, p.minimizer) << "\n";
    }
    out << "steps = " << rec.search_steps << "\n";
    out << "segment = " << AgentList(instance, rec.segment) << "\n";
    out << "a = " << ToString(rec.a_star) << "\n";
    out << "lambda = " << ToString(rec.lambda) << "\n";
    out << "epsilon = " << ToString(rec.epsilon) << "\n";
  }
  return out.str();
}

GeneralTrace ParseTrace(std::string_view text, const MarketInstance& instance) {
  GeneralTrace trace;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  auto number_of = [&](const std::string& s) {
    auto q = ParseRational(s);
    if (!q) {
      throw Error(ErrorCode::kSyntaxError,
                  "line " + std::to_string(number) + ": bad number '" + s + "'");
    }
    return *q;
  };
  auto agents_of = [&](std::istringstream&& ids) {
    std::vector<int> out;
    std::string id;
    while (ids >> id) {
      int i = instance.AgentIndex(id);
      if (i < 0) throw Error(ErrorCode::kSemanticError, "agent id: " + id);
      out.push_back(i);
    }
    return out;
  };
  while (std::getline(in, line)) {
    ++number;
    if (line.empty() || line[0] == '#') continue;
    if (line[0] == '[') {
      trace.calls.emplace_back();
      continue;
    }
    if (trace.calls.empty()) {
      throw Error(ErrorCode::kSyntaxError,
                  "line " + std::to_string(number) + ": field outside a call");
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kSyntaxError,
                  "line " + std::to_string(number) + ": expected '='");
    }
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    key.erase(key.find_last_not_of(' ') + 1);
    value.erase(0, value.find_first_not_of(' '));
    NextSegRecord& rec = trace.calls.back();
    if (key == "segment") {
      rec.segment = agents_of(std::istringstream(value));
    } else if (key == "probe") {
      std::istringstream words(value);
      std::string a, g;
      words >> a >> g;
      rec.probes.push_back(
          {number_of(a), number_of(g), agents_of(std::move(words))});
    } else if (key == "a") {
      rec.a_star = number_of(value);
    } else if (key == "lambda") {
      rec.lambda = number_of(value);
    } else if (key == "epsilon") {
      rec.epsilon = number_of(value);
    } else if (key == "g0") {
      rec.g0 = number_of(value);
    } else if (key == "steps") {
      rec.search_steps = std::stoi(value);
    }
  }
  return trace;
}

Equilibrium ToEquilibrium(const GeneralEquilibrium& eq) {
  return Equilibrium{eq.prices, eq.allocation, eq.lambda, eq.segments};
}

}  // namespace cfm
