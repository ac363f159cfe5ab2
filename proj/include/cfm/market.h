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

// Market instances with covering constraints, builders for the structured
// special cases, and the sufficient-demand check.

#ifndef CFM_MARKET_H_
#define CFM_MARKET_H_

#include <optional>
#include <string>
#include <vector>

#include "cfm/rational.h"

namespace cfm {

// A unit-supply good. For flow markets scale holds the edge capacity, so one
// unit of the good is scale units of flow.
struct Good {
  std::string id;
  Rational scale = 1;

  bool operator==(const Good&) const = default;
};

// sum_j coef[j] x_ij >= rhs
struct CoverRow {
  std::vector<Rational> coef;
  Rational rhs;

  bool operator==(const CoverRow&) const = default;
};

struct Agent {
  std::string id;
  Rational budget;
  std::vector<Rational> delays;
  std::vector<CoverRow> cover;

  bool operator==(const Agent&) const = default;
};

struct MarketInstance {
  std::string name;
  std::vector<Good> goods;
  std::vector<Agent> agents;

  int num_agents() const { return static_cast<int>(agents.size()); }
  int num_goods() const { return static_cast<int>(goods.size()); }
  int GoodIndex(const std::string& id) const;
  int AgentIndex(const std::string& id) const;

  bool operator==(const MarketInstance&) const = default;
};

// allocation[i][j] is the amount of good j held by agent i.
using Allocation = std::vector<std::vector<Rational>>;
using PriceVector = std::vector<Rational>;

struct Segment {
  std::vector<int> agents;  // indices, ascending
  Rational lambda;

  bool operator==(const Segment&) const = default;
};

// Solver-independent view of an equilibrium, as written to disk.
struct Equilibrium {
  PriceVector prices;
  Allocation allocation;
  std::vector<Rational> lambda;
  std::vector<Segment> segments;

  bool operator==(const Equilibrium&) const = default;
};

// Throws kSemanticError naming the offending field.
void ValidateInstance(const MarketInstance& instance);

Allocation ZeroAllocation(const MarketInstance& instance);
Rational DelayOf(const MarketInstance& instance, int agent,
                 const std::vector<Rational>& bundle);
Rational PaymentOf(const PriceVector& prices,
                   const std::vector<Rational>& bundle);

// Slots 1..sum(r) + spare_slots, slot t has delay t for everyone.
MarketInstance BuildSingleMachine(const std::vector<Rational>& budgets,
                                  const std::vector<int>& requirements,
                                  int spare_slots = 0);

// machine_delays[k] lists the per-unit delays of the machines of type k;
// requirements[i][k] is agent i's demand for type k.
MarketInstance BuildMultiType(
    const std::vector<std::vector<Rational>>& machine_delays,
    const std::vector<std::vector<Rational>>& requirements,
    const std::vector<Rational>& budgets);

// allowed[i][k] lists the machine indices of type k usable by agent i.
MarketInstance BuildLaminar(
    const std::vector<std::vector<Rational>>& machine_delays,
    const std::vector<std::vector<std::vector<int>>>& allowed,
    const std::vector<std::vector<Rational>>& requirements,
    const std::vector<Rational>& budgets);

struct FlowEdge {
  std::string from;
  std::string to;
  Rational capacity;
  Rational delay;
};

struct FlowAgent {
  std::string source;
  std::string sink;
  Rational demand;
  Rational budget;
};

// Goods are edges, x_ie = flow / capacity. Conservation is written as two
// covering rows per interior node.
MarketInstance BuildFlowMarket(const std::vector<FlowEdge>& edges,
                               const std::vector<FlowAgent>& agents);

// Price per unit of flow for each edge good: p_j / scale_j.
PriceVector FlowUnitPrices(const MarketInstance& instance,
                           const PriceVector& prices);

struct SingleMachineView {
  std::vector<Rational> budgets;
  std::vector<int> requirements;
  int spare_slots = 0;
};

// Recognizes instances of the single-machine shape.
std::optional<SingleMachineView> AsSingleMachine(
    const MarketInstance& instance);

struct DemandVerdict {
  // Some optimal zero-price bundle holds more than one unit of some good.
  bool single_good = false;
  // The canonical zero-price bundle touches a good whose aggregate
  // zero-price demand exceeds its supply.
  bool aggregate = false;
  bool satisfied() const { return single_good || aggregate; }
};

std::vector<DemandVerdict> CheckSufficientDemand(
    const MarketInstance& instance);

}  // namespace cfm

#endif  // CFM_MARKET_H_
