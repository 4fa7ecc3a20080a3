#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "beliefsafe/nfg.hpp"
#include "beliefsafe/strategy.hpp"

namespace beliefsafe {

class bound_domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct OpportunityRisk {
  double opportunity = 0.0;
  double risk = 0.0;
};

/// Existence envelope for the λ-blend in normal-form games:
/// ((1−λ)(μ−ν), (1−λ)(μ−ν) + λμη).
inline OpportunityRisk nfg_upper_bound(double mu, double nu, double eta, double lambda) {
  if (!(nu <= mu)) throw bound_domain_error("nfg_upper_bound: requires ν ≤ μ");
  if (!(eta >= 0.0 && eta <= 2.0)) throw bound_domain_error("nfg_upper_bound: requires 0 ≤ η ≤ 2");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw bound_domain_error("nfg_upper_bound: requires λ ∈ [0,1]");
  const double base = (1.0 - lambda) * (mu - nu);
  return {base, base + lambda * mu * eta};
}

/// Impossibility floor on risk for any strategy that misses at most (1−λ)(μ−ν).
inline double nfg_lower_bound(double mu, double nu, std::optional<double> kappa, double lambda) {
  if (!kappa) throw bound_domain_error("nfg_lower_bound: type intensity undefined");
  if (*kappa < 0.0) throw bound_domain_error("nfg_lower_bound: requires κ ≥ 0");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw bound_domain_error("nfg_lower_bound: requires λ ∈ [0,1]");
  return (*kappa * mu - nu) * (1.0 + lambda);
}

struct NfgEnvelope {
  double lambda = 0.0;
  double upper_opportunity = 0.0;
  double upper_risk = 0.0;
  std::optional<double> lower_risk_given_opportunity;
};

inline NfgEnvelope nfg_envelope(const GameStats& st, double lambda) {
  const auto up = nfg_upper_bound(st.mu, st.nu, st.eta, lambda);
  NfgEnvelope env{lambda, up.opportunity, up.risk, std::nullopt};
  if (st.kappa && *st.kappa >= 0.0) env.lower_risk_given_opportunity = nfg_lower_bound(st.mu, st.nu, st.kappa, lambda);
  return env;
}

/// Hard instance for the impossibility result. Columns on I₊ = {i: y′_i > y″_i}
/// get (β, −β, …, −β), the rest (−β, β, …, β), with β = μ−ν; odd row counts get
/// a trailing zero row; ν is added to every entry.
inline PayoffMatrix adversarial_matrix(double mu, double nu, const HypothesisSet& theta, std::size_t a,
                                       std::size_t b) {
  if (a < 2) throw bound_domain_error("adversarial_matrix: requires a ≥ 2");
  if (b != theta.dimension()) throw dimension_error("adversarial_matrix: b != Θ dimension");
  if (!(mu > nu)) throw bound_domain_error("adversarial_matrix: requires μ > ν");
  if (!(nu >= 0.0)) throw bound_domain_error("adversarial_matrix: requires ν ≥ 0 (otherwise μ_Θ(A) ≤ μ fails)");
  // κ does not depend on the payoffs; any matrix of the right width will do.
  const GameStats st = theta_stats(theta, PayoffMatrix(1, b, std::vector<double>(b, 0.0)));
  if (!st.kappa) throw bound_domain_error("adversarial_matrix: type intensity undefined");
  const auto& y1 = theta[st.kappa_pair->first];
  const auto& y2 = theta[st.kappa_pair->second];
  const double beta = mu - nu;
  const std::size_t patterned = a % 2 == 0 ? a : a - 1;
  std::vector<double> e(a * b, nu);
  for (std::size_t j = 0; j < b; ++j) {
    const double sign = y1[j] > y2[j] ? 1.0 : -1.0;
    for (std::size_t i = 0; i < patterned; ++i) e[i * b + j] += (i == 0 ? sign : -sign) * beta;
  }
  return PayoffMatrix(a, b, std::move(e));
}

struct SbgConstants {
  double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0;
};

/// C1..C4 of the stochastic-game existence bound. C4's numerator is read as
/// 2 − 2γ² + 1 = 3 − 2γ².
inline SbgConstants sbg_constants(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw bound_domain_error("sbg_constants: requires γ ∈ (0,1)");
  const double om = 1.0 - gamma;
  SbgConstants c;
  c.c1 = (gamma * gamma - 3.0 * gamma + 6.0) / (om * om);
  c.c3 = (gamma * gamma - 3.0 * gamma + 2.0) / om;
  c.c4 = (2.0 - 2.0 * gamma * gamma + 1.0) / (om * om);
  c.c2 = std::max(c.c3, c.c4);
  return c;
}

struct SbgEnvelope {
  double lambda = 0.0, gamma = 0.0, r_max = 0.0, nu = 0.0;
  SbgConstants constants;
  double upper_opportunity = 0.0;
  double upper_risk = 0.0;
  double lower_opportunity = 0.0;
  double lower_risk = 0.0;
};

inline SbgEnvelope sbg_envelopes(double gamma, double r_max, double nu, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw bound_domain_error("sbg_envelopes: requires λ ∈ [0,1]");
  if (!(r_max > 0.0)) throw bound_domain_error("sbg_envelopes: requires r_max > 0");
  SbgEnvelope env;
  env.constants = sbg_constants(gamma);
  if (!(std::abs(nu) <= r_max / (1.0 - gamma) * (1.0 + 1e-12)))
    throw bound_domain_error("sbg_envelopes: |ν| exceeds r_max/(1−γ)");
  env.lambda = lambda;
  env.gamma = gamma;
  env.r_max = r_max;
  env.nu = nu;
  const double denom = 1.0 - lambda * gamma;
  env.upper_opportunity = (env.constants.c1 * r_max - gamma * nu) * (1.0 - lambda) / denom;
  env.upper_risk = (env.constants.c2 * r_max - gamma * nu) * (1.0 + lambda) / denom;
  env.lower_opportunity = (r_max - nu) * (1.0 - lambda) / denom;
  env.lower_risk = (r_max - nu) * (1.0 + lambda) / denom;
  return env;
}

}  // namespace beliefsafe
