
#include "cfm/io.h"

#include "cfm/error.h"
#include "gtest/gtest.h"
#include "tables.h"

namespace cfm {
namespace {

std::string ErrorText(std::string_view text) {
  try {
    ParseInstance(text);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

TEST(InstanceIoTest, RoundTrips) {
  for (const MarketInstance& m :
       {tables::Hole1(), tables::Hole5(), tables::SpNetwork(),
        BuildMultiType({{1, 2}, {2, 4, 6}}, {{1, 1}, {1, 2}}, {4, 6})}) {
    EXPECT_EQ(ParseInstance(WriteInstance(m)), m);
  }
}

TEST(InstanceIoTest, SparseCoverAndComments) {
  MarketInstance m = ParseInstance(R"(# two goods
[market]
name = tiny
[goods]
a
b scale=2
[agent x]
budget = 3/2
delays = 1, 2
cover: b:1 >= 1/2   # only b counts
)");
  ASSERT_EQ(m.num_goods(), 2);
  EXPECT_EQ(m.goods[1].scale, 2);
  EXPECT_EQ(m.agents[0].budget, MakeRational(3, 2));
  EXPECT_EQ(m.agents[0].cover[0].coef, (std::vector<Rational>{0, 1}));
  EXPECT_EQ(m.agents[0].cover[0].rhs, MakeRational(1, 2));
}

TEST(InstanceIoTest, DecimalsRejectedWithPosition) {
  std::string msg = ErrorText("[market]\nname = d\n[goods]\na\n[agent 1]\n"
                              "budget = 0.5\ndelays = 1\ncover: 1 >= 1\n");
  EXPECT_NE(msg.find("SyntaxError"), std::string::npos) << msg;
  EXPECT_NE(msg.find("line 6"), std::string::npos) << msg;
}

TEST(InstanceIoTest, SemanticErrorsNameTheField) {
  std::string bad_budget = ErrorText(
      "[goods]\na\n[agent 1]\nbudget = -1\ndelays = 1\ncover: 1 >= 1\n");
  EXPECT_NE(bad_budget.find("budget"), std::string::npos) << bad_budget;
  std::string bad_good = ErrorText(
      "[goods]\na\n[agent 1]\nbudget = 1\ndelays = 1\ncover: z:1 >= 1\n");
  EXPECT_NE(bad_good.find("good id"), std::string::npos) << bad_good;
  std::string short_delays = ErrorText(
      "[goods]\na\nb\n[agent 1]\nbudget = 1\ndelays = 1\ncover: 1,1 >= 1\n");
  EXPECT_NE(short_delays.find("delays"), std::string::npos) << short_delays;
}

TEST(EquilibriumIoTest, RoundTrips) {
  MarketInstance m = tables::Hole1();
  Equilibrium eq;
  eq.prices = tables::ParseList(tables::kHole1Prices[1]);
  eq.allocation = ZeroAllocation(m);
  eq.allocation[3][3] = MakeRational(4, 5);
  eq.allocation[3][4] = MakeRational(1, 5);
  eq.lambda = {13, 8, MakeRational(14, 3), MakeRational(5, 3),
               MakeRational(5, 3), 1};
  eq.segments = {{{5}, 1}, {{3, 4}, MakeRational(5, 3)}};
  std::string text = WriteEquilibrium(m, eq);
  EXPECT_NE(text.find("t4 = 13/3"), std::string::npos) << text;
  EXPECT_EQ(ParseEquilibrium(text, m), eq);
}

}  // namespace
}  // namespace cfm
