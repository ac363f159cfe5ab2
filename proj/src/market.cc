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

#include "cfm/market.h"

#include <algorithm>
#include <map>
#include <set>

#include "cfm/error.h"
#include "cfm/lp.h"

namespace cfm {

int MarketInstance::GoodIndex(const std::string& id) const {
  for (int j = 0; j < num_goods(); ++j) {
    if (goods[j].id == id) return j;
  }
  return -1;
}

int MarketInstance::AgentIndex(const std::string& id) const {
  for (int i = 0; i < num_agents(); ++i) {
    if (agents[i].id == id) return i;
  }
  return -1;
}

void ValidateInstance(const MarketInstance& instance) {
  auto fail = [](const std::string& field, const std::string& what) {
    throw Error(ErrorCode::kSemanticError, field + ": " + what);
  };
  if (instance.agents.empty()) fail("agents", "at least one agent required");
  if (instance.goods.empty()) fail("goods", "at least one good required");
  std::set<std::string> ids;
  for (const Good& g : instance.goods) {
    if (g.id.empty() || !ids.insert(g.id).second) fail("good id", g.id);
    if (sgn(g.scale) <= 0) fail("scale", g.id);
  }
  std::set<std::string> agent_ids;
  const size_t m = instance.goods.size();
  for (const Agent& a : instance.agents) {
    if (a.id.empty() || !agent_ids.insert(a.id).second) fail("agent id", a.id);
    if (sgn(a.budget) <= 0) fail("budget", "agent " + a.id);
    if (a.delays.size() != m) fail("delays", "agent " + a.id);
    for (const Rational& d : a.delays) {
      if (sgn(d) < 0) fail("delays", "agent " + a.id);
    }
    for (const CoverRow& row : a.cover) {
      if (row.coef.size() != m) fail("good id", "cover row of agent " + a.id);
      if (sgn(row.rhs) < 0) fail("cover", "negative requirement, agent " + a.id);
    }
  }
}

Allocation ZeroAllocation(const MarketInstance& instance) {
  return Allocation(instance.num_agents(),
                    std::vector<Rational>(instance.num_goods()));
}

Rational DelayOf(const MarketInstance& instance, int agent,
                 const std::vector<Rational>& bundle) {
  Rational total = 0;
  const std::vector<Rational>& d = instance.agents[agent].delays;
  for (size_t j = 0; j < bundle.size(); ++j) {
    if (sgn(bundle[j]) != 0) total += d[j] * bundle[j];
  }
  return total;
}

Rational PaymentOf(const PriceVector& prices,
                   const std::vector<Rational>& bundle) {
  Rational total = 0;
  for (size_t j = 0; j < bundle.size(); ++j) {
    if (sgn(bundle[j]) != 0) total += prices[j] * bundle[j];
  }
  return total;
}

namespace {

void CheckBudgets(const std::vector<Rational>& budgets) {
  for (const Rational& b : budgets) {
    if (sgn(b) <= 0) {
      throw Error(ErrorCode::kNonPositiveInput, "budget " + ToString(b));
    }
  }
}

std::string AgentId(int i) { return std::to_string(i + 1); }

}  // namespace

MarketInstance BuildSingleMachine(const std::vector<Rational>& budgets,
                                  const std::vector<int>& requirements,
                                  int spare_slots) {
  if (budgets.size() != requirements.size()) {
    throw Error(ErrorCode::kLengthMismatch, "budgets vs requirements");
  }
  if (budgets.empty()) throw Error(ErrorCode::kNonPositiveInput, "no agents");
  CheckBudgets(budgets);
  int slots = spare_slots;
  for (int r : requirements) {
    if (r < 1) {
      throw Error(ErrorCode::kNonPositiveInput,
                  "requirement " + std::to_string(r));
    }
    slots += r;
  }
  if (spare_slots < 0) {
    throw Error(ErrorCode::kNonPositiveInput, "spare slots");
  }
  MarketInstance out;
  out.name = "single-machine";
  for (int t = 1; t <= slots; ++t) out.goods.push_back({"t" + std::to_string(t)});
  for (size_t i = 0; i < budgets.size(); ++i) {
    Agent a;
    a.id = AgentId(static_cast<int>(i));
    a.budget = budgets[i];
    for (int t = 1; t <= slots; ++t) a.delays.push_back(t);
    a.cover.push_back({std::vector<Rational>(slots, Rational(1)),
                       Rational(requirements[i])});
    out.agents.push_back(std::move(a));
  }
  return out;
}

MarketInstance BuildLaminar(
    const std::vector<std::vector<Rational>>& machine_delays,
    const std::vector<std::vector<std::vector<int>>>& allowed,
    const std::vector<std::vector<Rational>>& requirements,
    const std::vector<Rational>& budgets) {
  const size_t types = machine_delays.size();
  const size_t n = budgets.size();
  if (types == 0 || n == 0) {
    throw Error(ErrorCode::kNonPositiveInput, "no types or no agents");
  }
  if (requirements.size() != n || allowed.size() != n) {
    throw Error(ErrorCode::kLengthMismatch, "per-agent lists");
  }
  CheckBudgets(budgets);
  for (size_t i = 0; i < n; ++i) {
    if (requirements[i].size() != types || allowed[i].size() != types) {
      throw Error(ErrorCode::kLengthMismatch, "agent " + AgentId(i) + " types");
    }
  }
  auto set_name = [](const std::set<int>& s) {
    std::string out = "{";
    for (int j : s) {
      if (out.size() > 1) out += ",";
      out += std::to_string(j + 1);
    }
    return out + "}";
  };
  for (size_t k = 0; k < types; ++k) {
    const int machines = static_cast<int>(machine_delays[k].size());
    Rational demand = 0;
    std::vector<std::set<int>> family;
    for (size_t i = 0; i < n; ++i) {
      if (sgn(requirements[i][k]) < 0) {
        throw Error(ErrorCode::kNonPositiveInput, "requirement");
      }
      demand += requirements[i][k];
      std::set<int> s(allowed[i][k].begin(), allowed[i][k].end());
      for (int j : s) {
        if (j < 0 || j >= machines) {
          throw Error(ErrorCode::kLengthMismatch, "machine index");
        }
      }
      family.push_back(std::move(s));
    }
    if (demand > machines) {
      throw Error(ErrorCode::kInsufficientCapacity,
                  "type " + std::to_string(k + 1));
    }
    for (size_t a = 0; a < n; ++a) {
      for (size_t b = 0; b < n; ++b) {
        if (a == b) continue;
        const std::set<int>& big = family[a];
        const std::set<int>& small = family[b];
        bool meets = false, small_in_big = true;
        for (int j : small) {
          if (big.count(j)) {
            meets = true;
          } else {
            small_in_big = false;
          }
        }
        const bool big_in_small =
            std::includes(small.begin(), small.end(), big.begin(), big.end());
        if (meets && !small_in_big && !big_in_small) {
          throw Error(ErrorCode::kNotLaminar,
                      set_name(big) + " and " + set_name(small));
        }
      }
    }
    for (size_t a = 0; a < n; ++a) {
      for (size_t b = 0; b < n; ++b) {
        if (a == b) continue;
        const std::set<int>& big = family[a];
        const std::set<int>& small = family[b];
        const bool small_in_big =
            std::includes(big.begin(), big.end(), small.begin(), small.end());
        if (!small_in_big || small.size() == big.size() || small.empty()) {
          continue;
        }
        Rational inner_min = machine_delays[k][*small.begin()];
        for (int j : small) inner_min = std::min(inner_min, machine_delays[k][j]);
        for (int j : big) {
          if (!small.count(j) && machine_delays[k][j] > inner_min) {
            throw Error(ErrorCode::kMonotonicityViolated,
                        set_name(big) + " over " + set_name(small));
          }
        }
      }
    }
  }
  MarketInstance out;
  out.name = types == 1 ? "single-type" : "multi-type";
  std::vector<std::pair<size_t, int>> good_of;
  for (size_t k = 0; k < types; ++k) {
    for (size_t j = 0; j < machine_delays[k].size(); ++j) {
      std::string id = types == 1 ? "t" + std::to_string(j + 1)
                                  : "m" + std::to_string(k + 1) + "." +
                                        std::to_string(j + 1);
      out.goods.push_back({id});
      good_of.push_back({k, static_cast<int>(j)});
    }
  }
  const size_t m = out.goods.size();
  for (size_t i = 0; i < n; ++i) {
    Agent a;
    a.id = AgentId(i);
    a.budget = budgets[i];
    for (auto [k, j] : good_of) a.delays.push_back(machine_delays[k][j]);
    for (size_t k = 0; k < types; ++k) {
      CoverRow row{std::vector<Rational>(m), requirements[i][k]};
      std::set<int> s(allowed[i][k].begin(), allowed[i][k].end());
      for (size_t g = 0; g < m; ++g) {
        if (good_of[g].first == k && s.count(good_of[g].second)) row.coef[g] = 1;
      }
      a.cover.push_back(std::move(row));
    }
    out.agents.push_back(std::move(a));
  }
  return out;
}

MarketInstance BuildMultiType(
    const std::vector<std::vector<Rational>>& machine_delays,
    const std::vector<std::vector<Rational>>& requirements,
    const std::vector<Rational>& budgets) {
  std::vector<std::vector<std::vector<int>>> allowed(budgets.size());
  for (auto& per_type : allowed) {
    for (const auto& delays : machine_delays) {
      std::vector<int> all(delays.size());
      for (size_t j = 0; j < delays.size(); ++j) all[j] = static_cast<int>(j);
      per_type.push_back(all);
    }
  }
  MarketInstance out =
      BuildLaminar(machine_delays, allowed, requirements, budgets);
  if (machine_delays.size() == 1) out.name = "single-machine";
  return out;
}

MarketInstance BuildFlowMarket(const std::vector<FlowEdge>& edges,
                               const std::vector<FlowAgent>& agents) {
  if (edges.empty() || agents.empty()) {
    throw Error(ErrorCode::kBadGraph, "no edges or no agents");
  }
  std::vector<std::string> nodes;
  auto node_index = [&](const std::string& v) {
    for (size_t k = 0; k < nodes.size(); ++k) {
      if (nodes[k] == v) return static_cast<int>(k);
    }
    return -1;
  };
  MarketInstance out;
  out.name = "flow";
  for (const FlowEdge& e : edges) {
    if (e.from.empty() || e.to.empty() || e.from == e.to) {
      throw Error(ErrorCode::kBadGraph, "edge " + e.from + "->" + e.to);
    }
    if (sgn(e.capacity) <= 0) {
      throw Error(ErrorCode::kNonPositiveInput, "capacity " + e.from + "->" + e.to);
    }
    if (sgn(e.delay) < 0) {
      throw Error(ErrorCode::kNonPositiveInput, "delay " + e.from + "->" + e.to);
    }
    for (const std::string& v : {e.from, e.to}) {
      if (node_index(v) < 0) nodes.push_back(v);
    }
    out.goods.push_back({e.from + "->" + e.to, e.capacity});
  }
  const size_t m = edges.size();
  for (size_t i = 0; i < agents.size(); ++i) {
    const FlowAgent& fa = agents[i];
    if (node_index(fa.source) < 0 || node_index(fa.sink) < 0 ||
        fa.source == fa.sink) {
      throw Error(ErrorCode::kBadGraph,
                  "agent " + AgentId(i) + " terminals " + fa.source + "," +
                      fa.sink);
    }
    if (sgn(fa.demand) <= 0) {
      throw Error(ErrorCode::kNonPositiveInput, "demand of agent " + AgentId(i));
    }
    if (sgn(fa.budget) <= 0) {
      throw Error(ErrorCode::kNonPositiveInput, "budget of agent " + AgentId(i));
    }
    Agent a;
    a.id = AgentId(i);
    a.budget = fa.budget;
    for (const FlowEdge& e : edges) a.delays.push_back(e.delay * e.capacity);
    // Net outflow per node, in normalized units.
    auto net_out = [&](const std::string& v) {
      std::vector<Rational> row(m);
      for (size_t e = 0; e < m; ++e) {
        if (edges[e].from == v) row[e] += edges[e].capacity;
        if (edges[e].to == v) row[e] -= edges[e].capacity;
      }
      return row;
    };
    a.cover.push_back({net_out(fa.source), fa.demand});
    for (const std::string& v : nodes) {
      if (v == fa.source || v == fa.sink) continue;
      std::vector<Rational> row = net_out(v);
      std::vector<Rational> neg(m);
      for (size_t e = 0; e < m; ++e) neg[e] = -row[e];
      a.cover.push_back({std::move(row), 0});
      a.cover.push_back({std::move(neg), 0});
    }
    out.agents.push_back(std::move(a));
  }
  return out;
}

PriceVector FlowUnitPrices(const MarketInstance& instance,
                           const PriceVector& prices) {
  PriceVector out(prices.size());
  for (size_t j = 0; j < prices.size(); ++j) {
    out[j] = prices[j] / instance.goods[j].scale;
  }
  return out;
}

std::optional<SingleMachineView> AsSingleMachine(
    const MarketInstance& instance) {
  SingleMachineView view;
  const int m = instance.num_goods();
  int total = 0;
  for (const Agent& a : instance.agents) {
    if (a.cover.size() != 1) return std::nullopt;
    for (int t = 0; t < m; ++t) {
      if (a.delays[t] != t + 1 || a.cover[0].coef[t] != 1) return std::nullopt;
    }
    const Rational& r = a.cover[0].rhs;
    if (r.get_den() != 1 || sgn(r) <= 0 || !r.get_num().fits_sint_p()) {
      return std::nullopt;
    }
    view.budgets.push_back(a.budget);
    view.requirements.push_back(static_cast<int>(r.get_num().get_si()));
    total += view.requirements.back();
    if (total > m) return std::nullopt;
  }
  view.spare_slots = m - total;
  return view;
}

std::vector<DemandVerdict> CheckSufficientDemand(
    const MarketInstance& instance) {
  const int n = instance.num_agents();
  const int m = instance.num_goods();
  std::vector<DemandVerdict> out(n);
  std::vector<std::vector<Rational>> canonical(n);
  for (int i = 0; i < n; ++i) {
    const Agent& a = instance.agents[i];
    lp::LinearProgram prog;
    for (int j = 0; j < m; ++j) prog.AddVariable();
    for (const CoverRow& row : a.cover) {
      std::vector<lp::Term> terms;
      for (int j = 0; j < m; ++j) {
        if (sgn(row.coef[j]) != 0) terms.push_back({j, row.coef[j]});
      }
      if (terms.empty()) {
        if (sgn(row.rhs) > 0) {
          throw Error(ErrorCode::kDelayLpInfeasible, "agent " + a.id);
        }
        continue;
      }
      prog.AddConstraint(terms, lp::Relation::kGreaterEqual, row.rhs);
    }
    lp::Objective delay{{}, lp::Sense::kMinimize};
    for (int j = 0; j < m; ++j) {
      if (sgn(a.delays[j]) != 0) delay.terms.push_back({j, a.delays[j]});
    }
    prog.SetObjective(delay);
    lp::LpSolution base = lp::Solve(prog);
    if (base.status != lp::Status::kOptimal) {
      throw Error(ErrorCode::kDelayLpInfeasible, "agent " + a.id);
    }
    canonical[i] = base.values;
    if (!delay.terms.empty()) {
      prog.AddConstraint(delay.terms, lp::Relation::kEqual, base.objective);
    }
    for (int j = 0; j < m && !out[i].single_good; ++j) {
      prog.SetObjective({{j, 1}}, lp::Sense::kMaximize);
      lp::LpSolution probe = lp::Solve(prog);
      // An unbounded coordinate certainly exceeds one unit.
      if (probe.status == lp::Status::kUnbounded ||
          (probe.status == lp::Status::kOptimal && probe.objective > 1)) {
        out[i].single_good = true;
      }
    }
  }
  std::vector<Rational> total(m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) total[j] += canonical[i][j];
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      if (sgn(canonical[i][j]) > 0 && total[j] > 1) out[i].aggregate = true;
    }
  }
  return out;
}

}  // namespace cfm
