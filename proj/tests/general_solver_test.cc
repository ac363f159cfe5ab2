
#include "cfm/general_solver.h"

#include <random>

#include "cfm/error.h"
#include "cfm/scheduling.h"
#include "cfm/verifier.h"
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

TEST(GeneralSolverTest, HoleOneWithSpareSlot) {
  MarketInstance m = tables::Hole1(1);
  GeneralEquilibrium eq = SolveGeneral(m);
  EXPECT_EQ(eq.prices, tables::ParseList("30,17,9,13/3,8/3,1,0"));
  EXPECT_EQ(eq.lambda, (std::vector<Rational>{13, 8, Q(14, 3), Q(5, 3),
                                              Q(5, 3), 1}));
  ASSERT_EQ(eq.segments.size(), 5u);
  EXPECT_EQ(eq.segments[0].agents, std::vector<int>{5});
  EXPECT_EQ(eq.segments[1].agents, (std::vector<int>{3, 4}));
  for (const NextSegRecord& call : eq.trace.calls) {
    EXPECT_GE(call.g0, 0);
    EXPECT_LT(call.search_steps, 200);
  }
  EXPECT_TRUE(VerifyEquilibrium(m, eq.allocation, eq.prices).pass());
}

TEST(GeneralSolverTest, FirstCallFindsLastAgent) {
  MarketInstance m = tables::Hole1(1);
  SolverContext ctx(m);
  // At a = 0 the prices are zero, so {6} keeps its whole budget.
  EXPECT_EQ(ctx.F(0, ctx.Mask({5})), 1);
  NextSegRecord rec = NextSegment(ctx, true, {});
  EXPECT_EQ(rec.segment, std::vector<int>{5});
  EXPECT_EQ(rec.a_star, 1);
  EXPECT_EQ(rec.lambda, 1);
  EXPECT_EQ(ctx.prices()[5], 1);
  // Any epsilon short of the next critical value works.
  EXPECT_GT(rec.epsilon, 0);
  EXPECT_LT(rec.epsilon, Q(2, 3));
}

TEST(GeneralSolverTest, NoSpareSlotLeavesPricesUnbounded) {
  EXPECT_EQ(CodeOf([] { SolveGeneral(tables::Hole1()); }),
            ErrorCode::kValidDualUnbounded);
}

TEST(GeneralSolverTest, NetworkRun) {
  MarketInstance m = tables::SpNetwork();
  GeneralEquilibrium eq = SolveGeneral(m);
  ASSERT_EQ(eq.segments.size(), 2u);
  EXPECT_EQ(eq.segments[0].agents, (std::vector<int>{2, 3, 4}));
  EXPECT_EQ(eq.segments[0].lambda, Q(8, 37));
  EXPECT_EQ(eq.segments[1].agents, (std::vector<int>{0, 1}));
  EXPECT_EQ(eq.segments[1].lambda, Q(478, 1147));
  PriceVector unit = FlowUnitPrices(m, eq.prices);
  std::vector<Rational> expected(10);
  expected[m.GoodIndex("s->t")] = Q(8, 37);
  expected[m.GoodIndex("s->w")] = Q(16, 37);
  expected[m.GoodIndex("w->u")] = Q(478, 1147);
  expected[m.GoodIndex("v->t")] = Q(478, 1147);
  EXPECT_EQ(unit, expected);
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(PaymentOf(eq.prices, eq.allocation[i]), m.agents[i].budget);
  }
  EXPECT_TRUE(VerifyEquilibrium(m, eq.allocation, eq.prices).pass());
}

TEST(GeneralSolverTest, TwoIndependentCopies) {
  std::vector<Rational> slots = {1, 2, 3, 4, 5, 6, 7};
  std::vector<std::vector<Rational>> req;
  std::vector<Rational> budgets;
  for (int copy = 0; copy < 2; ++copy) {
    for (const Rational& b : tables::kHole1Budgets) {
      req.push_back(copy == 0 ? std::vector<Rational>{1, 0}
                              : std::vector<Rational>{0, 1});
      budgets.push_back(b);
    }
  }
  MarketInstance m = BuildMultiType({slots, slots}, req, budgets);
  GeneralEquilibrium eq = SolveGeneral(m);
  EXPECT_EQ(eq.prices,
            tables::ParseList("30,17,9,13/3,8/3,1,0,30,17,9,13/3,8/3,1,0"));
  EXPECT_TRUE(VerifyEquilibrium(m, eq.allocation, eq.prices).pass());
}

TEST(GeneralSolverTest, TraceReplayReproducesEquilibrium) {
  MarketInstance m = tables::SpNetwork();
  GeneralEquilibrium eq = SolveGeneral(m);
  std::string text = WriteTrace(m, eq.trace);
  GeneralTrace parsed = ParseTrace(text, m);
  GeneralEquilibrium again = ReplayTrace(m, parsed);
  EXPECT_EQ(ToEquilibrium(again), ToEquilibrium(eq));
  EXPECT_EQ(WriteTrace(m, again.trace), text);
}

TEST(GeneralSolverTest, TamperedTraceRejected) {
  MarketInstance m = tables::Hole1(1);
  GeneralTrace trace = SolveGeneral(m).trace;
  GeneralTrace wrong_a = trace;
  wrong_a.calls[1].a_star += Q(1, 10);
  EXPECT_EQ(CodeOf([&] { ReplayTrace(m, wrong_a); }),
            ErrorCode::kTraceMismatch);
  GeneralTrace wrong_set = trace;
  wrong_set.calls[1].segment = {3};
  EXPECT_EQ(CodeOf([&] { ReplayTrace(m, wrong_set); }),
            ErrorCode::kTraceMismatch);
  GeneralTrace wrong_lambda = trace;
  wrong_lambda.calls[0].lambda += 1;
  EXPECT_EQ(CodeOf([&] { ReplayTrace(m, wrong_lambda); }),
            ErrorCode::kTraceMismatch);
  GeneralTrace short_trace = trace;
  short_trace.calls.pop_back();
  EXPECT_EQ(CodeOf([&] { ReplayTrace(m, short_trace); }),
            ErrorCode::kTraceMismatch);
}

TEST(ParamLpTest, EqualWeightsFillAllSlots) {
  EXPECT_EQ(ParamLpValue(tables::Hole1(), std::vector<Rational>(6, 1)), 21);
}

TEST(ParamLpTest, StagewiseOrderFollowsLambda) {
  Allocation x = StagewiseOptimal(
      tables::Hole1(), {13, 8, Q(14, 3), Q(5, 3), Q(5, 3), 1});
  EXPECT_EQ(x[0][0], 1);
  EXPECT_EQ(x[1][1], 1);
  EXPECT_EQ(x[2][2], 1);
  EXPECT_EQ(x[3][3] + x[4][3], 1);
  EXPECT_EQ(x[3][4] + x[4][4], 1);
  EXPECT_EQ(x[5][5], 1);
}

TEST(ValidDualTest, PricesNeverDropAndFrozenGoodsStay) {
  MarketInstance m = tables::Hole1(1);
  SolverContext ctx(m);
  bool first = true;
  while (!ctx.active().empty()) {
    const PriceVector before = ctx.prices();
    const Allocation x = ctx.reference_allocation();
    NextSegRecord rec = NextSegment(ctx, first, {});
    first = false;
    if (ctx.active().empty()) break;
    for (Rational a : std::vector<Rational>{0, rec.epsilon / 2, rec.epsilon}) {
      const PriceVector& p = ctx.DualAt(a).prices;
      for (int j = 0; j < m.num_goods(); ++j) {
        EXPECT_GE(p[j], ctx.prices()[j]);
        for (const FrozenGroup& g : ctx.frozen()) {
          for (int i : g.agents) {
            if (sgn(ctx.reference_allocation()[i][j]) > 0) {
              EXPECT_EQ(p[j], ctx.prices()[j]);
            }
          }
        }
      }
    }
    for (int j = 0; j < m.num_goods(); ++j) EXPECT_GE(ctx.prices()[j], before[j]);
  }
}

// Exhaustive submodularity of the surplus function on random instances.
TEST(SurplusPropertyTest, SubmodularAtSampledParameters) {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<Rational> budgets;
    for (int i = 0; i < 5; ++i) {
      budgets.push_back(std::uniform_int_distribution<>(1, 40)(rng));
    }
    MarketInstance m = BuildSingleMachine(budgets, std::vector<int>(5, 1), 1);
    SolverContext ctx(m);
    MinimizeResult at_zero = ctx.MinF(0);
    EXPECT_GE(at_zero.value, 0);
    SolverContext probe(m);
    NextSegRecord rec = NextSegment(probe, true, {});
    for (Rational a : std::vector<Rational>{0, rec.a_star / 2, rec.a_star}) {
      SetFunction f{5, [&](SubsetMask s) { return ctx.F(a, s); }};
      EXPECT_FALSE(CheckSubmodular(f).has_value()) << trial << " a=" << a;
    }
  }
}

TEST(AgreementTest, RandomSingleMachineInstances) {
  std::mt19937 rng(29);
  for (int trial = 0; trial < 15; ++trial) {
    const int n = std::uniform_int_distribution<>(1, 5)(rng);
    SchedulingInput in;
    for (int i = 0; i < n; ++i) {
      in.budgets.push_back(std::uniform_int_distribution<>(1, 100)(rng));
      in.requirements.push_back(std::uniform_int_distribution<>(1, 3)(rng));
    }
    Equilibrium fast = ToEquilibrium(SolveScheduling(in, 1), n);
    GeneralEquilibrium slow =
        SolveGeneral(BuildSingleMachine(in.budgets, in.requirements, 1));
    EXPECT_EQ(fast.prices, slow.prices) << trial;
    EXPECT_EQ(fast.lambda, slow.lambda) << trial;
    EXPECT_EQ(fast.segments, slow.segments) << trial;
  }
}

}  // namespace
}  // namespace cfm
