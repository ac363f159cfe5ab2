
#include "cfm/market.h"

#include <algorithm>
#include <random>

#include "cfm/error.h"
#include "cfm/lp.h"
#include "gtest/gtest.h"
#include "tables.h"

namespace cfm {
namespace {

Rational Q(long n, long d = 1) { return MakeRational(n, d); }

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kSemanticError;
}

TEST(SingleMachineTest, HoleOneShape) {
  MarketInstance m = tables::Hole1();
  ASSERT_EQ(m.num_agents(), 6);
  ASSERT_EQ(m.num_goods(), 6);
  for (const Agent& a : m.agents) {
    for (int t = 0; t < 6; ++t) EXPECT_EQ(a.delays[t], t + 1);
    ASSERT_EQ(a.cover.size(), 1u);
    EXPECT_EQ(a.cover[0].rhs, 1);
  }
  EXPECT_EQ(m.agents[0].budget, 30);
  EXPECT_EQ(m.GoodIndex("t4"), 3);
  EXPECT_EQ(m.AgentIndex("6"), 5);
  EXPECT_EQ(m.AgentIndex("7"), -1);
}

TEST(SingleMachineTest, RequirementsSetSlotCount) {
  EXPECT_EQ(BuildSingleMachine({5}, {2}).num_goods(), 2);
  EXPECT_EQ(tables::Hole5().num_goods(), 9);
  EXPECT_EQ(tables::Hole1(1).num_goods(), 7);
}

TEST(SingleMachineTest, Errors) {
  EXPECT_EQ(CodeOf([] { BuildSingleMachine({1, 2}, {1}); }),
            ErrorCode::kLengthMismatch);
  EXPECT_EQ(CodeOf([] { BuildSingleMachine({0}, {1}); }),
            ErrorCode::kNonPositiveInput);
  EXPECT_EQ(CodeOf([] { BuildSingleMachine({1}, {0}); }),
            ErrorCode::kNonPositiveInput);
}

TEST(SingleMachineTest, ViewRecoversInputs) {
  auto view = AsSingleMachine(BuildSingleMachine({7, 2}, {2, 1}, 3));
  ASSERT_TRUE(view.has_value());
  EXPECT_EQ(view->budgets, (std::vector<Rational>{7, 2}));
  EXPECT_EQ(view->requirements, (std::vector<int>{2, 1}));
  EXPECT_EQ(view->spare_slots, 3);
  EXPECT_FALSE(AsSingleMachine(tables::SpNetwork()).has_value());
}

TEST(MultiTypeTest, TwoTypesGiveTwoRowsPerAgent) {
  MarketInstance m =
      BuildMultiType({{1, 2}, {1, 3, 5}}, {{1, 1}, {1, 2}}, {4, 6});
  EXPECT_EQ(m.num_goods(), 5);
  EXPECT_EQ(m.goods[2].id, "m2.1");
  ASSERT_EQ(m.agents[1].cover.size(), 2u);
  EXPECT_EQ(m.agents[1].cover[1].rhs, 2);
  EXPECT_EQ(m.agents[1].cover[1].coef,
            (std::vector<Rational>{0, 0, 1, 1, 1}));
  EXPECT_EQ(m.agents[0].delays, (std::vector<Rational>{1, 2, 1, 3, 5}));
}

TEST(MultiTypeTest, CapacityChecked) {
  EXPECT_EQ(CodeOf([] { BuildMultiType({{1}}, {{1}, {1}}, {1, 1}); }),
            ErrorCode::kInsufficientCapacity);
}

TEST(LaminarTest, CrossingSetsRejected) {
  EXPECT_EQ(CodeOf([] {
              BuildLaminar({{1, 2, 3}}, {{{0, 1}}, {{1, 2}}}, {{1}, {1}},
                           {1, 1});
            }),
            ErrorCode::kNotLaminar);
}

TEST(LaminarTest, OuterMachinesMustNotBeSlower) {
  // {1,2,3} over {1,2}: machine 3 must be no slower than the fastest of 1, 2.
  EXPECT_NO_THROW(BuildLaminar({{3, 2, 1}}, {{{0, 1, 2}}, {{0, 1}}},
                               {{1}, {1}}, {1, 1}));
  EXPECT_EQ(CodeOf([] {
              BuildLaminar({{1, 2, 3}}, {{{0, 1, 2}}, {{0, 1}}}, {{1}, {1}},
                           {1, 1});
            }),
            ErrorCode::kMonotonicityViolated);
}

// Brute-force laminarity and monotonicity over random set families.
TEST(LaminarTest, RandomFamiliesMatchBruteForce) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const int machines = 4;
    const int n = 3;
    std::vector<Rational> delays;
    for (int j = 0; j < machines; ++j) {
      delays.push_back(std::uniform_int_distribution<>(1, 4)(rng));
    }
    std::vector<std::vector<std::vector<int>>> allowed(n);
    std::vector<unsigned> masks;
    for (int i = 0; i < n; ++i) {
      unsigned mask = std::uniform_int_distribution<unsigned>(1, 15)(rng);
      masks.push_back(mask);
      std::vector<int> s;
      for (int j = 0; j < machines; ++j) {
        if (mask & (1u << j)) s.push_back(j);
      }
      allowed[i].push_back(s);
    }
    bool laminar = true, monotone = true;
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        unsigned x = masks[a], y = masks[b];
        if (a == b) continue;
        if ((x & y) && (x & y) != x && (x & y) != y) laminar = false;
        if ((x & y) == y && x != y) {
          Rational inner = 100;
          for (int j = 0; j < machines; ++j) {
            if (y & (1u << j)) inner = std::min(inner, delays[j]);
          }
          for (int j = 0; j < machines; ++j) {
            if ((x & ~y) & (1u << j) && delays[j] > inner) monotone = false;
          }
        }
      }
    }
    std::vector<std::vector<Rational>> req(n, std::vector<Rational>{1});
    try {
      BuildLaminar({delays}, allowed, req, {1, 1, 1});
      EXPECT_TRUE(laminar && monotone) << "trial " << trial;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kNotLaminar) {
        EXPECT_FALSE(laminar);
      } else {
        ASSERT_EQ(e.code(), ErrorCode::kMonotonicityViolated);
        EXPECT_TRUE(laminar);
        EXPECT_FALSE(monotone);
      }
    }
  }
}

TEST(FlowMarketTest, EncodingScalesByCapacity) {
  MarketInstance m = tables::SpNetwork();
  EXPECT_EQ(m.num_goods(), 10);
  EXPECT_EQ(m.goods[1].id, "s->w");
  EXPECT_EQ(m.goods[1].scale, 33);
  // Delay per normalized unit is delay times capacity.
  EXPECT_EQ(m.agents[0].delays[0], 91);
  EXPECT_EQ(m.agents[0].cover[0].rhs, 10);
  EXPECT_EQ(FlowUnitPrices(m, PriceVector(10, Rational(66)))[1], 2);
}

TEST(FlowMarketTest, PathFlowSatisfiesRows) {
  MarketInstance m = tables::SpNetwork();
  // Ten units along s-w-u-v-t.
  std::vector<Rational> x(10);
  x[1] = Q(10, 33);
  x[3] = Q(10, 21);
  x[5] = Q(10, 15);
  x[6] = 1;
  for (const CoverRow& row : m.agents[0].cover) {
    Rational lhs = 0;
    for (int j = 0; j < 10; ++j) lhs += row.coef[j] * x[j];
    EXPECT_GE(lhs, row.rhs);
  }
  EXPECT_EQ(DelayOf(m, 0, x), 40);
}

TEST(FlowMarketTest, Errors) {
  EXPECT_EQ(CodeOf([] { BuildFlowMarket({{"a", "a", 1, 1}}, {{"a", "b", 1, 1}}); }),
            ErrorCode::kBadGraph);
  EXPECT_EQ(CodeOf([] { BuildFlowMarket({{"a", "b", 1, 1}}, {{"a", "c", 1, 1}}); }),
            ErrorCode::kBadGraph);
  EXPECT_EQ(CodeOf([] { BuildFlowMarket({{"a", "b", 0, 1}}, {{"a", "b", 1, 1}}); }),
            ErrorCode::kNonPositiveInput);
}

TEST(ValidateTest, RejectsBadFields) {
  MarketInstance m = tables::Hole1();
  m.agents[2].budget = -1;
  EXPECT_EQ(CodeOf([&] { ValidateInstance(m); }), ErrorCode::kSemanticError);
  m = tables::Hole1();
  m.agents[0].delays.pop_back();
  EXPECT_EQ(CodeOf([&] { ValidateInstance(m); }), ErrorCode::kSemanticError);
  m = tables::Hole1();
  m.agents[1].id = "1";
  EXPECT_EQ(CodeOf([&] { ValidateInstance(m); }), ErrorCode::kSemanticError);
}

TEST(SufficientDemandTest, SingleMachineUsesAggregateReading) {
  for (const DemandVerdict& v : CheckSufficientDemand(tables::Hole1())) {
    EXPECT_FALSE(v.single_good);
    EXPECT_TRUE(v.aggregate);
    EXPECT_TRUE(v.satisfied());
  }
}

TEST(SufficientDemandTest, LoneAgentWithSlackIsNotSufficient) {
  auto v = CheckSufficientDemand(BuildSingleMachine({5}, {1}, 1));
  EXPECT_FALSE(v[0].satisfied());
  // Requiring two units on a free slot makes one good hit two units.
  MarketInstance m = BuildMultiType({{1}}, {{1}}, {3});
  m.agents[0].cover[0].rhs = 2;
  EXPECT_TRUE(CheckSufficientDemand(m)[0].single_good);
}

TEST(SufficientDemandTest, NetworkAgentsCompeteForCheapEdges) {
  for (const DemandVerdict& v : CheckSufficientDemand(tables::SpNetwork())) {
    EXPECT_TRUE(v.satisfied());
  }
}

}  // namespace
}  // namespace cfm
