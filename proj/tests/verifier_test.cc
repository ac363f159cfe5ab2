
#include "cfm/verifier.h"

#include <random>

#include "cfm/error.h"
#include "cfm/scheduling.h"
#include "gtest/gtest.h"
#include "oracles.h"
#include "tables.h"

namespace cfm {
namespace {

Rational Q(long n, long d = 1) { return MakeRational(n, d); }

struct Solved {
  MarketInstance instance;
  Allocation allocation;
  PriceVector prices;
};

Solved HoleOneSolved() {
  SchedulingEquilibrium eq =
      SolveScheduling({tables::kHole1Budgets, std::vector<int>(6, 1)});
  return {tables::Hole1(), eq.allocation, eq.prices};
}

TEST(VerifyTest, SchedulingOutputPasses) {
  Solved s = HoleOneSolved();
  VerificationReport r = VerifyEquilibrium(s.instance, s.allocation, s.prices);
  EXPECT_TRUE(r.pass()) << r.ToText();
  EXPECT_TRUE(r.FailedChecks().empty());
}

TEST(VerifyTest, EmptyAllocationFailsCovering) {
  MarketInstance m = tables::Hole1();
  VerificationReport r =
      VerifyEquilibrium(m, ZeroAllocation(m), PriceVector(6, Rational(0)));
  EXPECT_FALSE(r.pass());
  EXPECT_TRUE(r.Failed(kCheckCovering));
}

TEST(VerifyTest, CorruptionsNameTheBrokenCheck) {
  const Solved s = HoleOneSolved();
  // Raising any price leaves its buyer over budget.
  for (int j = 0; j < 6; ++j) {
    PriceVector p = s.prices;
    p[j] += 1;
    EXPECT_TRUE(VerifyEquilibrium(s.instance, s.allocation, p)
                    .Failed(kCheckBudget)) << j;
  }
  // A cheaper later slot frees money to move earlier.
  for (int j = 1; j < 6; ++j) {
    PriceVector p = s.prices;
    p[j] -= 1;
    EXPECT_TRUE(VerifyEquilibrium(s.instance, s.allocation, p)
                    .Failed(kCheckOptimalBundle)) << j;
  }
  Allocation less = s.allocation;
  less[5][5] -= Q(1, 2);
  EXPECT_TRUE(VerifyEquilibrium(s.instance, less, s.prices)
                  .Failed(kCheckCovering));
  Allocation more = s.allocation;
  more[0][1] += Q(1, 2);
  EXPECT_TRUE(VerifyEquilibrium(s.instance, more, s.prices)
                  .Failed(kCheckSupply));
}

TEST(VerifyTest, FirstPriceMinusOneIsStillAnEquilibrium) {
  PriceVector p = tables::ParseList(tables::kHole1Prices[0]);
  p[0] -= 1;
  EXPECT_TRUE(CheckPriceEquilibrium(tables::Hole1(), p).equilibrium);
}

TEST(VerifyTest, DimensionMismatch) {
  MarketInstance m = tables::Hole1();
  try {
    VerifyEquilibrium(m, ZeroAllocation(m), PriceVector(5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
}

TEST(OptimalBundleTest, LastAgentAtHoleOnePrices) {
  OptimalBundle ob = SolveOptimalBundle(
      tables::Hole1(), 5, tables::ParseList(tables::kHole1Prices[1]));
  ASSERT_EQ(ob.status, lp::Status::kOptimal);
  EXPECT_EQ(ob.delay, 6);
  EXPECT_EQ(ob.bundle[5], 1);
}

TEST(PriceCheckTest, HoleOneVectorsAndMidpoints) {
  MarketInstance m = tables::Hole1();
  std::vector<PriceVector> p;
  for (const std::string& s : tables::kHole1Prices) {
    p.push_back(tables::ParseList(s));
  }
  for (int k = 0; k < 4; ++k) {
    PriceVerdict v = CheckPriceEquilibrium(m, p[k]);
    EXPECT_TRUE(v.equilibrium) << k << ": " << v.reason;
    ASSERT_TRUE(v.allocation.has_value());
    EXPECT_TRUE(VerifyEquilibrium(m, *v.allocation, p[k]).pass());
  }
  for (auto [a, b] : {std::pair{0, 5}, {1, 4}, {2, 3}}) {
    EXPECT_FALSE(
        CheckPriceEquilibrium(m, tables::Midpoint(p[a], p[b])).equilibrium)
        << a << "," << b;
  }
}

// With slot 1 at 35 only agents 1 and 2 want it, and their unique optimal
// bundles take 17/22 + 2/11 = 21/22 of it, so a positive price is left
// unsold.
TEST(PriceCheckTest, SlotOneAtThirtyFiveIsUndersold) {
  MarketInstance m = tables::Hole1();
  for (int k : {4, 5}) {
    const PriceVector p = tables::ParseList(tables::kHole1Prices[k]);
    EXPECT_FALSE(CheckPriceEquilibrium(m, p).equilibrium) << k;
    Rational slot_one = 0;
    for (int i = 0; i < 6; ++i) {
      auto [lo, hi] = testing_oracles::SlotOneShareRange(
          p, m.agents[i].budget);
      EXPECT_EQ(lo, hi) << "agent " << i + 1;
      slot_one += lo;
      EXPECT_EQ(SolveOptimalBundle(m, i, p).bundle[0], lo);
    }
    EXPECT_EQ(slot_one, MakeRational(21, 22)) << k;
  }
}

TEST(PriceCheckTest, SomeHoleFiveVectors) {
  MarketInstance m = tables::Hole5();
  for (int k : {0, 7, 19}) {
    EXPECT_TRUE(
        CheckPriceEquilibrium(m, tables::ParseList(tables::kHole5Prices[k]))
            .equilibrium)
        << k;
  }
}

TEST(ParetoTest, Verdicts) {
  Solved s = HoleOneSolved();
  EXPECT_TRUE(CheckPareto(s.instance, s.allocation).pass);
  // Slot 1 unused while agent 6 sits on slot 6.
  Allocation waste = s.allocation;
  waste[0][0] = 0;
  waste[0][5] = 1;
  waste[5][5] = 0;
  waste[5][0] = 0;
  waste[5][5] = 0;
  Allocation x = ZeroAllocation(s.instance);
  for (int i = 0; i < 5; ++i) x[i] = s.allocation[i];
  x[0] = std::vector<Rational>(6);
  x[0][1] = 0;
  MarketInstance seven = BuildSingleMachine({30, 1}, {1, 1}, 4);
  Allocation y = ZeroAllocation(seven);
  y[0][1] = 1;
  y[1][5] = 1;
  PropertyVerdict v = CheckPareto(seven, y);
  EXPECT_FALSE(v.pass);
  EXPECT_FALSE(v.witness.empty());
  MarketInstance alone = BuildSingleMachine({5}, {1});
  Allocation z = ZeroAllocation(alone);
  z[0][0] = 1;
  EXPECT_TRUE(CheckPareto(alone, z).pass);
}

TEST(EnvyFreeTest, Verdicts) {
  Solved s = HoleOneSolved();
  EXPECT_TRUE(CheckEnvyFree(s.instance, s.allocation, s.prices).pass);
  // Equal budgets, but agent 2 holds the earlier slot.
  MarketInstance m = BuildSingleMachine({30, 30, 9, 4, 3, 1},
                                        std::vector<int>(6, 1));
  Allocation x = s.allocation;
  std::swap(x[0], x[1]);
  PropertyVerdict v = CheckEnvyFree(m, x, s.prices);
  EXPECT_FALSE(v.pass);
  EXPECT_NE(v.witness.find("1"), std::string::npos) << v.witness;
  MarketInstance alone = BuildSingleMachine({5}, {1});
  Allocation z = ZeroAllocation(alone);
  z[0][0] = 1;
  EXPECT_TRUE(CheckEnvyFree(alone, z, {5}).pass);
}

TEST(SharingIncentiveTest, Verdicts) {
  Solved s = HoleOneSolved();
  EXPECT_TRUE(CheckSharingIncentive(s.instance, s.allocation).pass);
  SchedulingEquilibrium eq = SolveScheduling({{6, 6, 6}, {1, 1, 1}});
  MarketInstance m = BuildSingleMachine({6, 6, 6}, {1, 1, 1});
  EXPECT_TRUE(CheckSharingIncentive(m, eq.allocation).pass);
}

TEST(SharingIncentiveTest, DominatedDelay) {
  MarketInstance m = tables::Hole1();
  // A 30/64 share of each slot covers one unit with the earliest shares.
  std::vector<Rational> share(6, Q(30, 64));
  auto d = DominatedDelay(m, 0, share);
  ASSERT_TRUE(d.has_value());
  EXPECT_EQ(*d, Q(30, 64) * 1 + Q(30, 64) * 2 + Q(4, 64) * 3);
  EXPECT_FALSE(DominatedDelay(m, 5, std::vector<Rational>(6, Q(1, 64))));
}

TEST(BudgetExhaustionTest, Verdicts) {
  Solved s = HoleOneSolved();
  EXPECT_TRUE(CheckBudgetExhaustion(s.instance, s.allocation, s.prices).pass);
  PriceVector p = s.prices;
  p[0] -= 1;
  EXPECT_FALSE(CheckBudgetExhaustion(s.instance, s.allocation, p).pass);
}

TEST(IcTest, HoleOneMisreports) {
  MarketInstance m = tables::Hole1();
  IcOutcome last = IcExperiment(m, 5, Q(1, 2), 1);
  EXPECT_EQ(last.truthful_delay, 6);
  EXPECT_EQ(last.misreport_delay, 6);
  IcOutcome first = IcExperiment(m, 0, 10, 1);
  EXPECT_EQ(first.truthful_delay, 1);
  EXPECT_GE(first.misreport_delay, first.truthful_delay);
  IcOutcome same = IcExperiment(m, 2, 9, 1);
  EXPECT_EQ(same.truthful_delay, same.misreport_delay);
  try {
    IcExperiment(tables::SpNetwork(), 0, 1, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotSchedulingInstance);
  }
}

// Verified pairs always pass the price-only check.
TEST(ConsistencyTest, VerifiedPricesPassPriceCheck) {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = std::uniform_int_distribution<>(1, 5)(rng);
    SchedulingInput in;
    for (int i = 0; i < n; ++i) {
      in.budgets.push_back(std::uniform_int_distribution<>(1, 50)(rng));
      in.requirements.push_back(std::uniform_int_distribution<>(1, 2)(rng));
    }
    SchedulingEquilibrium eq = SolveScheduling(in);
    MarketInstance m = BuildSingleMachine(in.budgets, in.requirements);
    ASSERT_TRUE(VerifyEquilibrium(m, eq.allocation, eq.prices).pass());
    EXPECT_TRUE(CheckPriceEquilibrium(m, eq.prices).equilibrium) << trial;
  }
}

}  // namespace
}  // namespace cfm
