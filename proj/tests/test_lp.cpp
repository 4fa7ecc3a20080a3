#include <gtest/gtest.h>

#include "beliefsafe/maximin.hpp"
#include "beliefsafe/random.hpp"

namespace beliefsafe {
namespace {

TEST(SolveLp, TextbookMaximization) {
  // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → (2, 6), 36
  LinearProgram lp(2);
  lp.objective = {3, 5};
  lp.add({1, 0}, Relation::less_equal, 4);
  lp.add({0, 2}, Relation::less_equal, 12);
  lp.add({3, 2}, Relation::less_equal, 18);
  const auto s = solve_lp(lp);
  ASSERT_TRUE(s.ok());
  EXPECT_NEAR(s.value, 36.0, 1e-9);
  EXPECT_NEAR(s.x[0], 2.0, 1e-9);
  EXPECT_NEAR(s.x[1], 6.0, 1e-9);
}

TEST(SolveLp, EqualityAndFreeVariable) {
  // max −z with z free, z ≥ x − 3, x = 1 → z = −2
  LinearProgram lp(2);
  lp.objective = {0, -1};
  lp.set_free(1);
  lp.add({1, 0}, Relation::equal, 1);
  lp.add({-1, 1}, Relation::greater_equal, -3);
  const auto s = solve_lp(lp);
  ASSERT_TRUE(s.ok());
  EXPECT_NEAR(s.x[1], -2.0, 1e-9);
}

TEST(SolveLp, InfeasibleAndUnbounded) {
  LinearProgram bad(1);
  bad.objective = {1};
  bad.add({1}, Relation::less_equal, 1);
  bad.add({1}, Relation::greater_equal, 2);
  EXPECT_EQ(solve_lp(bad).status, LpStatus::infeasible);

  LinearProgram open(1);
  open.objective = {1};
  EXPECT_EQ(solve_lp(open).status, LpStatus::unbounded);
}

TEST(SolveLp, UpperBounds) {
  LinearProgram lp(2);
  lp.objective = {1, 1};
  lp.upper = {0.25, 2.0};
  const auto s = solve_lp(lp);
  ASSERT_TRUE(s.ok());
  EXPECT_NEAR(s.value, 2.25, 1e-9);
}

TEST(Maximin, MatchingPennies) {
  const auto r = maximin_columns(PayoffMatrix{{1, -1}, {-1, 1}});
  EXPECT_NEAR(r.value, 0.0, 1e-12);
  EXPECT_NEAR(r.strategy[0], 0.5, 1e-12);
}

TEST(Maximin, DominatedRow) {
  const auto r = maximin_columns(PayoffMatrix{{3, 2}, {1, 0}});
  EXPECT_NEAR(r.value, 2.0, 1e-12);
  EXPECT_EQ(r.strategy, (MixedStrategy{1, 0}));
}

// Weak duality on random games: the row guarantee never exceeds what the
// column player's own maximin concedes.
TEST(Maximin, DualityOnRandomGames) {
  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> e(12);
    for (double& v : e) v = rng.uniform(-1, 1);
    PayoffMatrix a(3, 4, e);
    const auto row = maximin_columns(a);
    const auto col = maximin_columns(a.transposed().scaled(-1.0));
    EXPECT_NEAR(row.value, -col.value, 1e-8);
    for (double v : a.left_times(row.strategy.view())) EXPECT_GE(v, row.value - 1e-9);
  }
}

TEST(Maximin, HullMinimizerOnSimplex) {
  PayoffMatrix mp{{1, -1}, {-1, 1}};
  const auto y = hull_minimizer(mp, HypothesisSet::full_simplex(2));
  EXPECT_NEAR(y[0], 0.5, 1e-12);
  const auto members = materialize(HypothesisSet::full_simplex(2), mp);
  EXPECT_EQ(members.size(), 3u);
}

}  // namespace
}  // namespace beliefsafe
