#include <gtest/gtest.h>

#include <boost/rational.hpp>

#include "beliefsafe/bounds.hpp"
#include "beliefsafe/random.hpp"

namespace beliefsafe {
namespace {

using Q = boost::rational<long long>;

const PayoffMatrix kMp{{1, -1}, {-1, 1}};
const PayoffMatrix kAmp{{1.2, -0.8}, {-0.8, 1.2}};

HypothesisSet six_types() {
  return HypothesisSet({MixedStrategy{1, 0}, MixedStrategy{0, 1}, MixedStrategy{0.5, 0.5},
                        MixedStrategy{0.1088, 0.8912}, MixedStrategy{0.25, 0.75}, MixedStrategy{0.8, 0.2}});
}

TEST(ThetaStats, PureVertices) {
  const auto st = theta_stats(HypothesisSet({MixedStrategy{1, 0}, MixedStrategy{0, 1}}), kMp);
  EXPECT_DOUBLE_EQ(st.eta, 2.0);
  ASSERT_TRUE(st.kappa);
  EXPECT_DOUBLE_EQ(*st.kappa, 1.0);
}

TEST(ThetaStats, Singleton) {
  const auto st = theta_stats(HypothesisSet({MixedStrategy{0.3, 0.7}}), kMp);
  EXPECT_FALSE(st.kappa);
  EXPECT_DOUBLE_EQ(st.eta, 0.0);
}

TEST(ThetaStats, MuNu) {
  const auto mp = theta_stats(six_types(), kMp);
  EXPECT_NEAR(mp.mu, 1.0, 1e-12);
  EXPECT_NEAR(mp.nu, 0.0, 1e-12);
  const auto amp = theta_stats(six_types(), kAmp);
  EXPECT_NEAR(amp.mu, 1.2, 1e-12);
  EXPECT_NEAR(amp.nu, 0.2, 1e-12);
  EXPECT_LE(amp.nu, amp.mu);
}

TEST(LambdaPolicy, Examples) {
  const auto theta = HypothesisSet({MixedStrategy{1, 0}, MixedStrategy{0, 1}, MixedStrategy{0.5, 0.5}});
  const auto safe = lambda_policy(kMp, theta, 0.0);
  for (double t : {0.0, 0.3, 1.0}) {
    const auto x = safe(Belief::mixture(3, 0, 1, t));
    EXPECT_NEAR(x[0], 0.5, 1e-12);
  }
  const auto half = lambda_policy(kMp, theta, 0.5)(Belief::point(3, 0));
  EXPECT_NEAR(half[0], 0.75, 1e-12);
  EXPECT_NEAR(half[1], 0.25, 1e-12);
  const auto greedy = lambda_policy(kMp, theta, 1.0);
  EXPECT_EQ(greedy(Belief::point(3, 1)), best_response_to(kMp, {0, 1}));
  EXPECT_THROW(lambda_policy(kMp, theta, 1.5), std::invalid_argument);
}

TEST(PayoffGap, GreedyHasNoOpportunityGap) {
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> e(6);
    for (double& v : e) v = rng.uniform(-1, 1);
    PayoffMatrix a(2, 3, e);
    HypothesisSet theta({MixedStrategy{1, 0, 0}, MixedStrategy{0, 0.5, 0.5}, MixedStrategy{0.2, 0.2, 0.6}});
    EXPECT_NEAR(payoff_gap_nfg(a, theta, lambda_policy(a, theta, 1.0), 0.0).value, 0.0, 1e-12);
  }
}

TEST(PayoffGap, MatchingPenniesTradeoff) {
  const auto theta = HypothesisSet({MixedStrategy{1, 0}, MixedStrategy{0, 1}, MixedStrategy{0.5, 0.5}});
  for (double lam : {0.0, 0.25, 0.5, 1.0}) {
    const auto pi = lambda_policy(kMp, theta, lam);
    EXPECT_NEAR(payoff_gap_nfg(kMp, theta, pi, 0.0).value, 1.0 - lam, 1e-9) << lam;
    EXPECT_NEAR(payoff_gap_nfg(kMp, theta, pi, 2.0).value, 1.0 + lam, 1e-9) << lam;
  }
}

TEST(OpportunityRisk, Endpoints) {
  const auto theta = HypothesisSet::full_simplex(2);
  const auto g = opportunity_risk_nfg(kMp, theta, lambda_policy(kMp, theta, 1.0));
  EXPECT_NEAR(g.opportunity, 0.0, 1e-9);
  EXPECT_NEAR(g.risk, 2.0, 1e-9);
  const auto s = opportunity_risk_nfg(kMp, theta, lambda_policy(kMp, theta, 0.0));
  EXPECT_NEAR(s.opportunity, 1.0, 1e-9);
  EXPECT_NEAR(s.risk, 1.0, 1e-9);
}

TEST(OpportunityRisk, CurveIsMonotone) {
  const auto theta = six_types();
  const auto rep = opportunity_risk_nfg(kAmp, theta, lambda_policy(kAmp, theta, 0.5));
  EXPECT_GE(rep.opportunity, 0.0);
  EXPECT_GE(rep.risk + 1e-12, rep.opportunity);
  for (std::size_t i = 1; i < rep.curve.size(); ++i) EXPECT_GE(rep.curve[i].value + 1e-12, rep.curve[i - 1].value);
}

TEST(OpportunityRisk, AmpHalf) {
  const auto theta = six_types();
  const auto rep = opportunity_risk_nfg(kAmp, theta, lambda_policy(kAmp, theta, 0.5));
  EXPECT_NEAR(rep.opportunity, 0.5, 1e-6);
  EXPECT_NEAR(rep.risk, 1.5, 1e-6);
}

// Exact opportunity on dyadic games: every point belief, rational arithmetic.
Q to_q(double v) {
  const long long scaled = static_cast<long long>(std::llround(v * 8));
  return Q(scaled, 8);
}

TEST(OpportunityRisk, RationalOracle) {
  Rng rng(17);
  for (int t = 0; t < 40; ++t) {
    std::vector<double> e(6);
    for (double& v : e) v = static_cast<double>(static_cast<long long>(rng.index(17)) - 8) / 8.0;
    PayoffMatrix a(3, 2, e);
    HypothesisSet theta({MixedStrategy{1, 0}, MixedStrategy{0, 1}, MixedStrategy{0.5, 0.5}});
    const double lam = 0.5;
    const auto pi = lambda_policy(a, theta, lam);

    Q best_gap(0);
    for (std::size_t k = 0; k < theta.size(); ++k) {
      std::vector<Q> ay(3, Q(0));
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 2; ++j) ay[i] += to_q(a(i, j)) * to_q(theta[k][j]);
      Q top = ay[0];
      std::size_t arg = 0;
      for (std::size_t i = 1; i < 3; ++i)
        if (ay[i] > top) top = ay[i], arg = i;
      Q played(0);
      for (std::size_t i = 0; i < 3; ++i) {
        // safe strategy is double-valued; round to the nearest 1/2^20
        const auto s = Q(static_cast<long long>(std::llround(pi.safe()[i] * (1 << 20))), 1 << 20);
        const Q w = Q(1, 2) * (i == arg ? Q(1) : Q(0)) + Q(1, 2) * s;
        played += w * ay[i];
      }
      best_gap = std::max(best_gap, top - played);
    }
    const double oracle = boost::rational_cast<double>(best_gap);
    EXPECT_NEAR(payoff_gap_nfg(a, theta, pi, 0.0).value, oracle, 1e-5) << t;
  }
}

}  // namespace
}  // namespace beliefsafe
