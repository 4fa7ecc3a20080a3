#include <gtest/gtest.h>

#include "beliefsafe/nfg.hpp"

namespace beliefsafe {
namespace {

const PayoffMatrix kMp{{1, -1}, {-1, 1}};

TEST(PayoffMatrix, MaxNorm) {
  PayoffMatrix a{{1.2, -0.8}, {-0.8, 3.5}};
  EXPECT_DOUBLE_EQ(a.max_norm(), 3.5);
  EXPECT_DOUBLE_EQ(a.scaled(-2.0).max_norm(), 7.0);
}

TEST(PayoffMatrix, RejectsBadShapes) {
  EXPECT_THROW(PayoffMatrix(0, 2, {}), dimension_error);
  EXPECT_THROW(PayoffMatrix(2, 2, {1, 2, 3}), dimension_error);
  EXPECT_THROW(PayoffMatrix(1, 1, {std::nan("")}), std::invalid_argument);
  EXPECT_THROW((PayoffMatrix{{1, 2}, {3}}), dimension_error);
}

TEST(MixedStrategy, Validation) {
  EXPECT_NO_THROW(MixedStrategy({0.25, 0.75}));
  EXPECT_THROW(MixedStrategy({0.5, 0.6}), std::invalid_argument);
  EXPECT_THROW(MixedStrategy({-0.1, 1.1}), std::invalid_argument);
  EXPECT_TRUE(MixedStrategy::pure(3, 1).is_pure());
  EXPECT_FALSE(MixedStrategy::uniform(3).is_pure());
}

TEST(HypothesisSet, RejectsDuplicates) {
  EXPECT_THROW(HypothesisSet({MixedStrategy{1, 0}, MixedStrategy{1, 0}}), std::invalid_argument);
  EXPECT_THROW(HypothesisSet({MixedStrategy{1, 0}, MixedStrategy{1, 0, 0}}), std::exception);
}

TEST(Belief, MeanOfMixture) {
  HypothesisSet theta({MixedStrategy{1, 0}, MixedStrategy{0, 1}});
  const auto y = Belief::mixture(2, 0, 1, 0.3).mean(theta);
  EXPECT_NEAR(y[0], 0.3, 1e-15);
  EXPECT_NEAR(y[1], 0.7, 1e-15);
  EXPECT_THROW(Belief({0.5, 0.6}), std::invalid_argument);
}

TEST(ExpectedPayoff, Examples) {
  EXPECT_DOUBLE_EQ(expected_payoff({1, 0}, kMp, {1, 0}), 1.0);
  EXPECT_DOUBLE_EQ(expected_payoff({0.5, 0.5}, kMp, {0.3, 0.7}), 0.0);
  EXPECT_DOUBLE_EQ(expected_payoff({1, 0}, kMp.shifted(0.2), {0, 1}), -0.8);
  EXPECT_THROW(expected_payoff({1, 0, 0}, kMp, {1, 0}), dimension_error);
}

TEST(BestResponse, Examples) {
  HypothesisSet theta({MixedStrategy{0.7, 0.3}});
  EXPECT_EQ(best_response(kMp, Belief({1.0}), theta), (MixedStrategy{1, 0}));
  EXPECT_EQ(best_response_to(kMp, {0.5, 0.5}), (MixedStrategy{1, 0}));
  PayoffMatrix a{{2, 0}, {0, 1}};
  EXPECT_EQ(best_response_to(a, {0.4, 0.6}), (MixedStrategy{1, 0}));
  EXPECT_EQ(best_response_to(a, {0.2, 0.8}), (MixedStrategy{0, 1}));
}

TEST(Blend, Endpoints) {
  const MixedStrategy a{1, 0}, b{0.5, 0.5};
  EXPECT_EQ(blend(1.0, a, b), a);
  EXPECT_EQ(blend(0.0, a, b), b);
  const auto m = blend(0.5, a, b);
  EXPECT_DOUBLE_EQ(m[0], 0.75);
  EXPECT_DOUBLE_EQ(m[1], 0.25);
}

}  // namespace
}  // namespace beliefsafe
