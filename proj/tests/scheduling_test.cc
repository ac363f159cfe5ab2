
#include "cfm/scheduling.h"

#include <random>

#include "cfm/error.h"
#include "cfm/submodular.h"
#include "cfm/verifier.h"
#include "gtest/gtest.h"
#include "tables.h"

namespace cfm {
namespace {

Rational Q(long n, long d = 1) { return MakeRational(n, d); }

SchedulingInput HoleOne() {
  return {tables::kHole1Budgets, std::vector<int>(6, 1)};
}

TEST(LambdaTest, ClosedForm) {
  SchedulingInput in = HoleOne();
  EXPECT_EQ(LambdaOf({5}, 0, in), 1);
  EXPECT_EQ(LambdaOf({3, 4}, 1, in), Q(5, 3));
  EXPECT_EQ(LambdaOf({0, 1, 2}, Q(13, 3), in), Q(43, 6));
  EXPECT_THROW(LambdaOf({}, 0, in), Error);
}

TEST(LambdaTest, SurplusFunction) {
  SchedulingInput in = HoleOne();
  EXPECT_EQ(FSched({5}, 0, 1, in), 0);
  EXPECT_EQ(FSched({4, 5}, 0, 1, in), 1);
  for (std::vector<int> s : {std::vector<int>{0, 3}, {1, 2, 5}, {0, 1, 2, 3}}) {
    EXPECT_EQ(FSched(s, 2, LambdaOf(s, 2, in), in), 0);
  }
}

TEST(NextSegmentTest, HoleOneRun) {
  SchedulingInput in = HoleOne();
  NextSegmentResult a = NextSegmentScheduling(0, {0, 1, 2, 3, 4, 5}, in);
  EXPECT_EQ(a.agents, std::vector<int>{5});
  EXPECT_EQ(a.lambda, 1);
  NextSegmentResult b = NextSegmentScheduling(1, {0, 1, 2, 3, 4}, in);
  EXPECT_EQ(b.agents, (std::vector<int>{3, 4}));
  EXPECT_EQ(b.lambda, Q(5, 3));
  NextSegmentResult c = NextSegmentScheduling(9, {0, 1}, in);
  EXPECT_EQ(c.agents, std::vector<int>{1});
  EXPECT_EQ(c.lambda, 8);
}

TEST(SolveSchedulingTest, HoleOne) {
  SchedulingEquilibrium eq = SolveScheduling(HoleOne());
  ASSERT_EQ(eq.segments.size(), 5u);
  const std::vector<std::vector<int>> agents = {{5}, {3, 4}, {2}, {1}, {0}};
  const std::vector<Rational> lambdas = {1, Q(5, 3), Q(14, 3), 8, 13};
  for (int k = 0; k < 5; ++k) {
    EXPECT_EQ(eq.segments[k].agents, agents[k]);
    EXPECT_EQ(eq.segments[k].lambda, lambdas[k]);
    EXPECT_LT(eq.segments[k].search_steps, 200);
  }
  EXPECT_EQ(eq.segments[1].first_slot, 4);
  EXPECT_EQ(eq.segments[1].last_slot, 5);
  EXPECT_EQ(eq.prices, tables::ParseList("30,17,9,13/3,8/3,1"));
  EXPECT_EQ(eq.allocation[3][3], Q(4, 5));
  EXPECT_EQ(eq.allocation[3][4], Q(1, 5));
  EXPECT_EQ(eq.allocation[4][3], Q(1, 5));
  EXPECT_EQ(eq.allocation[4][4], Q(4, 5));
  EXPECT_EQ(eq.allocation[5][5], 1);
}

TEST(SolveSchedulingTest, SingleAgentTwoSlots) {
  SchedulingEquilibrium eq = SolveScheduling({{5}, {2}});
  ASSERT_EQ(eq.segments.size(), 1u);
  EXPECT_EQ(eq.segments[0].lambda, Q(5, 3));
  EXPECT_EQ(eq.prices, (std::vector<Rational>{Q(10, 3), Q(5, 3)}));
}

TEST(SolveSchedulingTest, HoleFiveIsAnEquilibrium) {
  SchedulingInput in{tables::kHole5Budgets, std::vector<int>(9, 1)};
  SchedulingEquilibrium eq = SolveScheduling(in);
  MarketInstance m = tables::Hole5();
  EXPECT_TRUE(VerifyEquilibrium(m, eq.allocation, eq.prices).pass());
  EXPECT_TRUE(CheckPriceEquilibrium(m, eq.prices).equilibrium);
}

TEST(SolveSchedulingTest, SpareSlotsArePricedZeroAndUnused) {
  SchedulingEquilibrium eq = SolveScheduling(HoleOne(), 2);
  ASSERT_EQ(eq.prices.size(), 8u);
  EXPECT_EQ(eq.prices[6], 0);
  EXPECT_EQ(eq.prices[7], 0);
  EXPECT_EQ(eq.prices[0], 30);
}

TEST(AllocateSegmentTest, SingletonGetsWholeSlot) {
  SchedulingEquilibrium eq = SolveScheduling(HoleOne());
  Allocation x = AllocateSegment(eq.segments[0], HoleOne());
  ASSERT_EQ(x.size(), 1u);
  EXPECT_EQ(x[0], std::vector<Rational>{1});
}

TEST(MarginalPaymentTest, FirstSegmentPaysNothing) {
  SchedulingInput in = HoleOne();
  SchedulingEquilibrium eq = SolveScheduling(in);
  EXPECT_TRUE(IsMarginal(eq, in, 5));
  EXPECT_EQ(MarginalPayment(in, eq, 5), 0);
  SchedulingInput alone{{5}, {1}};
  EXPECT_EQ(MarginalPayment(alone, SolveScheduling(alone), 0), 0);
}

TEST(MarginalPaymentTest, ThirdAgentMustOutbidSegmentBelow) {
  SchedulingInput in = HoleOne();
  SchedulingEquilibrium eq = SolveScheduling(in);
  const Rational pay = MarginalPayment(in, eq, 2);
  EXPECT_EQ(pay, 6);
  // Re-run just above and just below the payment.
  auto lower_segments = [&](const Rational& m3) {
    SchedulingInput lie = in;
    lie.budgets[2] = m3;
    SchedulingEquilibrium run = SolveScheduling(lie);
    std::vector<std::pair<std::vector<int>, Rational>> out;
    for (int k = 0; k < 2; ++k) {
      out.push_back({run.segments[k].agents, run.segments[k].lambda});
    }
    return out;
  };
  auto truthful = lower_segments(9);
  EXPECT_EQ(lower_segments(pay + Q(1, 100)), truthful);
  EXPECT_NE(lower_segments(pay - Q(1, 100)), truthful);
}

TEST(MarginalPaymentTest, SplitSegmentIsNotMarginal) {
  SchedulingInput in = HoleOne();
  SchedulingEquilibrium eq = SolveScheduling(in);
  EXPECT_FALSE(IsMarginal(eq, in, 3));
  try {
    MarginalPayment(in, eq, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotMarginal);
  }
}

// Brute-force checks of the segment conditions on random inputs.
TEST(SchedulingPropertyTest, SegmentConditionsHold) {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = std::uniform_int_distribution<>(1, 7)(rng);
    SchedulingInput in;
    for (int i = 0; i < n; ++i) {
      in.budgets.push_back(std::uniform_int_distribution<>(1, 100)(rng));
      in.requirements.push_back(std::uniform_int_distribution<>(1, 3)(rng));
    }
    SchedulingEquilibrium eq = SolveScheduling(in);
    // Lambdas strictly increase.
    for (size_t k = 1; k < eq.segments.size(); ++k) {
      EXPECT_LT(eq.segments[k - 1].lambda, eq.segments[k].lambda);
    }
    // Decreasing convex curve.
    const auto& p = eq.prices;
    for (size_t t = 0; t + 1 < p.size(); ++t) EXPECT_GT(p[t], p[t + 1]);
    for (size_t t = 0; t + 2 < p.size(); ++t) {
      EXPECT_GE(p[t] - p[t + 1], p[t + 1] - p[t + 2]);
    }
    for (const SchedulingSegment& seg : eq.segments) {
      Rational total = 0, money = 0;
      for (int t = seg.first_slot; t <= seg.last_slot; ++t) total += p[t - 1];
      for (int i : seg.agents) money += in.budgets[i];
      EXPECT_EQ(total, money);
      // Every subset affords at most its share of the latest slots.
      const SubsetMask count = SubsetMask{1} << seg.agents.size();
      for (SubsetMask s = 1; s < count; ++s) {
        Rational m = 0;
        int r = 0;
        for (int k : MaskElements(s)) {
          m += in.budgets[seg.agents[k]];
          r += in.requirements[seg.agents[k]];
        }
        Rational tail = 0;
        for (int t = seg.last_slot - r + 1; t <= seg.last_slot; ++t) {
          tail += p[t - 1];
        }
        EXPECT_LE(tail, m);
      }
    }
    for (int i = 0; i < n; ++i) {
      EXPECT_EQ(PaymentOf(p, eq.allocation[i]), in.budgets[i]);
    }
    MarketInstance m = BuildSingleMachine(in.budgets, in.requirements);
    EXPECT_TRUE(VerifyEquilibrium(m, eq.allocation, p).pass()) << trial;
  }
}

}  // namespace
}  // namespace cfm
