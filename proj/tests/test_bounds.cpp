#include <gtest/gtest.h>

#include "beliefsafe/bounds.hpp"
#include "beliefsafe/random.hpp"

namespace beliefsafe {
namespace {

TEST(NfgUpperBound, Endpoints) {
  const auto safe = nfg_upper_bound(1.0, 0.0, 2.0, 0.0);
  EXPECT_DOUBLE_EQ(safe.opportunity, 1.0);
  EXPECT_DOUBLE_EQ(safe.risk, 1.0);
  const auto greedy = nfg_upper_bound(1.0, 0.0, 2.0, 1.0);
  EXPECT_DOUBLE_EQ(greedy.opportunity, 0.0);
  EXPECT_DOUBLE_EQ(greedy.risk, 2.0);
}

TEST(NfgUpperBound, Domain) {
  EXPECT_THROW(nfg_upper_bound(0.0, 1.0, 1.0, 0.5), bound_domain_error);
  EXPECT_THROW(nfg_upper_bound(1.0, 0.0, 2.5, 0.5), bound_domain_error);
  EXPECT_THROW(nfg_upper_bound(1.0, 0.0, 1.0, -0.1), bound_domain_error);
}

TEST(NfgUpperBound, Monotone) {
  Rng rng(2);
  for (int t = 0; t < 200; ++t) {
    const double mu = rng.uniform(0.1, 2.0), nu = rng.uniform(-mu, mu), eta = rng.uniform(0, 2);
    double prev_o = 1e9, prev_r = -1e9;
    for (int k = 0; k <= 10; ++k) {
      const auto b = nfg_upper_bound(mu, nu, eta, k / 10.0);
      EXPECT_LE(b.opportunity, prev_o + 1e-12);
      prev_o = b.opportunity;
      // risk rises with λ only when μη dominates μ−ν
      if (mu * eta >= mu - nu) {
        EXPECT_GE(b.risk, prev_r - 1e-12);
      }
      prev_r = b.risk;
    }
  }
}

TEST(NfgLowerBound, Values) {
  EXPECT_DOUBLE_EQ(nfg_lower_bound(1.2, 0.2, 1.0, 0.5), 1.5);
  EXPECT_THROW(nfg_lower_bound(1.0, 0.0, std::nullopt, 0.5), bound_domain_error);
  EXPECT_THROW(nfg_lower_bound(1.0, 0.0, -0.5, 0.5), bound_domain_error);
}

// The safe blend on pure-vertex Matching Pennies beats the existence envelope.
TEST(NfgUpperBound, PinnedCounterexample) {
  const PayoffMatrix a{{1, -1}, {-1, 1}};
  const HypothesisSet theta({MixedStrategy{1, 0}, MixedStrategy{0, 1}});
  const auto st = theta_stats(theta, a);
  // ν read as min over members of the best-response value is 1 here, so the
  // envelope opportunity at λ=0 collapses to 0 while the safe play misses 1.
  EXPECT_NEAR(st.nu, 1.0, 1e-12);
  const auto env = nfg_envelope(st, 0.0);
  const auto rep = opportunity_risk_nfg(a, theta, lambda_policy(a, theta, 0.0));
  EXPECT_GT(rep.opportunity, env.upper_opportunity + 0.5);
}

TEST(AdversarialMatrix, Shape) {
  const HypothesisSet theta({MixedStrategy{0.9, 0.1}, MixedStrategy{0.2, 0.8}});
  const auto a = adversarial_matrix(1.0, 0.25, theta, 3, 2);
  EXPECT_EQ(a.rows(), 3u);
  for (std::size_t j = 0; j < 2; ++j) {
    EXPECT_DOUBLE_EQ(std::abs(a(0, j) - 0.25), 0.75);
    EXPECT_DOUBLE_EQ(a(0, j) + a(1, j), 0.5);
    EXPECT_DOUBLE_EQ(a(2, j), 0.25);
  }
  EXPECT_DOUBLE_EQ(a(0, 0) + a(0, 1), 0.5);
  EXPECT_LE(a.max_norm(), 1.0);
  EXPECT_THROW(adversarial_matrix(1.0, -0.1, theta, 2, 2), bound_domain_error);
  EXPECT_THROW(adversarial_matrix(1.0, 0.0, theta, 1, 2), bound_domain_error);
}

TEST(SbgConstants, Formulae) {
  const double g = 0.9;
  const auto c = sbg_constants(g);
  EXPECT_NEAR(c.c1, (0.81 - 2.7 + 6.0) / 0.01, 1e-9);
  EXPECT_NEAR(c.c3, (0.81 - 2.7 + 2.0) / 0.1, 1e-9);
  EXPECT_NEAR(c.c4, (3.0 - 1.62) / 0.01, 1e-9);
  EXPECT_DOUBLE_EQ(c.c2, std::max(c.c3, c.c4));
  EXPECT_THROW(sbg_constants(1.0), bound_domain_error);
  EXPECT_THROW(sbg_constants(0.0), bound_domain_error);
}

TEST(SbgEnvelopes, Ordering) {
  for (double g : {0.1, 0.5, 0.9, 0.99})
    for (int k = 0; k <= 10; ++k) {
      const double lam = k / 10.0;
      const auto e = sbg_envelopes(g, 1.0, 0.0, lam);
      EXPECT_LE(e.lower_opportunity, e.upper_opportunity + 1e-12);
      EXPECT_LE(e.lower_risk, e.upper_risk + 1e-12);
      if (k == 10) {
        EXPECT_DOUBLE_EQ(e.upper_opportunity, 0.0);
      }
    }
  EXPECT_NEAR(sbg_envelopes(0.5, 1.0, 0.0, 0.0).lower_opportunity, 1.0, 1e-12);
  EXPECT_THROW(sbg_envelopes(0.5, 1.0, 3.0, 0.5), bound_domain_error);
  EXPECT_THROW(sbg_envelopes(0.5, 0.0, 0.0, 0.5), bound_domain_error);
}

}  // namespace
}  // namespace beliefsafe
