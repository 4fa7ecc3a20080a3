#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "beliefsafe/maximin.hpp"
#include "beliefsafe/strategy.hpp"

namespace beliefsafe {

/// x⊤Ay.
inline double expected_payoff(const MixedStrategy& x, const PayoffMatrix& a, const MixedStrategy& y) {
  if (x.size() != a.rows() || y.size() != a.cols()) throw dimension_error("expected_payoff: dimension mismatch");
  return detail::dot(x.view(), a.times(y.view()));
}

/// Lowest-index row among those within kTieTolerance of the best.
inline std::size_t argmax_row(std::span<const double> values) {
  if (values.empty()) throw dimension_error("argmax_row: empty");
  const double best = *std::max_element(values.begin(), values.end());
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] >= best - kTieTolerance) return i;
  return 0;
}

/// Pure best response to E_ρ[y].
inline MixedStrategy best_response(const PayoffMatrix& a, const Belief& rho, const HypothesisSet& theta) {
  if (theta.dimension() != a.cols()) throw dimension_error("best_response: Θ dimension != cols(A)");
  const auto values = a.times(rho.mean(theta).view());
  return MixedStrategy::pure(a.rows(), argmax_row(values));
}

inline MixedStrategy best_response_to(const PayoffMatrix& a, const MixedStrategy& y) {
  return MixedStrategy::pure(a.rows(), argmax_row(a.times(y.view())));
}

struct GameStats {
  double eta = 0.0;
  std::optional<double> kappa;  // empty when no ordered pair is feasible
  std::optional<std::pair<std::size_t, std::size_t>> kappa_pair;
  double mu = 0.0;
  double nu = 0.0;
  double safe_value = 0.0;  // max_x min_{y∈Θ} x⊤Ay, i.e. ν over conv(Θ)
};

namespace detail {

struct KappaTerm {
  bool feasible = false;
  double value = 0.0;
};

// Objective and constraint of the type-intensity program for the ordered pair (y, z).
inline KappaTerm kappa_term(const MixedStrategy& y, const MixedStrategy& z) {
  double low_y = 0.0, high_y = 0.0, low_z = 0.0, high_z = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] <= z[i]) {
      low_y += y[i];
      low_z += z[i];
    } else {
      high_y += y[i];
      high_z += z[i];
    }
  }
  return {low_y < high_y, low_z - high_z};
}

}  // namespace detail

/// Diameter, type intensity, maximum and value of (Θ, A).
inline GameStats theta_stats(const HypothesisSet& theta, const PayoffMatrix& a) {
  if (theta.dimension() != a.cols()) throw dimension_error("theta_stats: Θ dimension != cols(A)");
  GameStats st;
  st.safe_value = maximin_strategy(a, theta).value;
  if (theta.is_full_simplex()) {
    const std::size_t b = theta.dimension();
    st.eta = b >= 2 ? 2.0 : 0.0;
    if (b >= 2) {
      st.kappa = 1.0;
      st.kappa_pair = std::make_pair(std::size_t{0}, std::size_t{1});
    }
    st.mu = a.max_norm();
    st.nu = st.safe_value;
    return st;
  }

  const std::size_t n = theta.size();
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) {
      if (p == q) continue;
      st.eta = std::max(st.eta, detail::l1_distance(theta[p].view(), theta[q].view()));
      const auto term = detail::kappa_term(theta[p], theta[q]);
      if (term.feasible && (!st.kappa || term.value > *st.kappa)) {
        st.kappa = term.value;
        st.kappa_pair = std::make_pair(p, q);
      }
    }
  }
  st.mu = 0.0;
  st.nu = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    const auto col = a.times(theta[k].view());
    double best = col.front();
    for (double v : col) {
      st.mu = std::max(st.mu, std::abs(v));
      best = std::max(best, v);
    }
    st.nu = std::min(st.nu, best);
  }
  return st;
}

using StrategyMap = std::function<MixedStrategy(const Belief&)>;

/// π(ρ) = λ·best_response(ρ) + (1−λ)·x̄.
class LambdaPolicy {
 public:
  LambdaPolicy(PayoffMatrix a, const HypothesisSet& theta, double lambda)
      : a_(std::move(a)), theta_(materialize(theta, a_)), lambda_(lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda_policy: λ outside [0,1]");
    safe_ = maximin_strategy(a_, theta_).strategy;
  }

  MixedStrategy operator()(const Belief& rho) const {
    return blend(lambda_, best_response(a_, rho, theta_), safe_);
  }

  const MixedStrategy& safe() const noexcept { return safe_; }
  const HypothesisSet& theta() const noexcept { return theta_; }
  double lambda() const noexcept { return lambda_; }

 private:
  PayoffMatrix a_;
  HypothesisSet theta_;
  double lambda_;
  MixedStrategy safe_;
};

inline LambdaPolicy lambda_policy(const PayoffMatrix& a, const HypothesisSet& theta, double lambda) {
  return LambdaPolicy(a, theta, lambda);
}

struct GapWitness {
  Belief belief;
  std::size_t true_type = 0;  // index of y⋆ in the (materialized) Θ
  double distance = 0.0;      // ‖E_ρ[y] − y⋆‖₁
  double gap = 0.0;
};

struct GapEntry {
  double eps = 0.0;
  double value = 0.0;
  GapWitness witness;
};

struct GapSearch {
  double mixture_step = 0.01;
  double distance_tol = 1e-12;

  std::string describe() const {
    std::ostringstream os;
    os << "point-masses+pairwise-mixtures(step=" << mixture_step << ")+boundary-mixtures";
    return os.str();
  }
};

struct GapReport {
  double opportunity = 0.0;
  double risk = 0.0;
  std::vector<GapEntry> curve;
  GapWitness opportunity_witness;
  GapWitness risk_witness;
  std::string search;
};

namespace detail {

struct GapCandidate {
  Belief belief;
  MixedStrategy mean;
};

inline std::vector<GapCandidate> gap_beliefs(const HypothesisSet& theta, std::span<const double> eps_values,
                                             const GapSearch& search) {
  const std::size_t n = theta.size();
  std::vector<GapCandidate> out;
  auto push = [&](Belief b) {
    MixedStrategy m = b.mean(theta);
    out.push_back({std::move(b), std::move(m)});
  };
  for (std::size_t k = 0; k < n; ++k) push(Belief::point(n, k));
  if (search.mixture_step > 0.0) {
    const auto steps = static_cast<std::size_t>(std::llround(1.0 / search.mixture_step));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        for (std::size_t s = 1; s < steps; ++s) {
          const double t = static_cast<double>(s) / static_cast<double>(steps);
          push(Belief::mixture(n, i, j, t));
        }
  }
  for (double eps : eps_values) {
    if (!(eps > 0.0)) continue;
    for (std::size_t target = 0; target < n; ++target)
      for (std::size_t k = 0; k < n; ++k) {
        if (k == target) continue;
        const double d = l1_distance(theta[k].view(), theta[target].view());
        if (d <= eps) continue;
        push(Belief::mixture(n, k, target, eps / d));
      }
  }
  return out;
}

struct ScoredCandidate {
  std::size_t belief = 0;
  std::size_t true_type = 0;
  double distance = 0.0;
  double gap = 0.0;
};

inline std::vector<ScoredCandidate> score_candidates(const PayoffMatrix& a, const HypothesisSet& theta,
                                                     const StrategyMap& pi,
                                                     const std::vector<GapCandidate>& beliefs) {
  const std::size_t n = theta.size();
  std::vector<std::vector<double>> columns(n);
  std::vector<double> best(n);
  for (std::size_t s = 0; s < n; ++s) {
    columns[s] = a.times(theta[s].view());
    best[s] = *std::max_element(columns[s].begin(), columns[s].end());
  }
  std::vector<ScoredCandidate> scored;
  scored.reserve(beliefs.size() * n);
  for (std::size_t c = 0; c < beliefs.size(); ++c) {
    const MixedStrategy x = pi(beliefs[c].belief);
    if (x.size() != a.rows()) throw dimension_error("payoff_gap_nfg: strategy map returned wrong size");
    for (std::size_t s = 0; s < n; ++s) {
      const double d = l1_distance(beliefs[c].mean.view(), theta[s].view());
      scored.push_back({c, s, d, best[s] - dot(x.view(), columns[s])});
    }
  }
  return scored;
}

inline GapEntry gap_at(double eps, const std::vector<GapCandidate>& beliefs,
                       const std::vector<ScoredCandidate>& scored, const GapSearch& search) {
  GapEntry e;
  e.eps = eps;
  const ScoredCandidate* arg = nullptr;
  for (const auto& sc : scored)
    if (sc.distance <= eps + search.distance_tol && (!arg || sc.gap > arg->gap)) arg = &sc;
  if (!arg) throw std::logic_error("payoff_gap_nfg: empty feasible set");
  e.value = arg->gap;
  e.witness = {beliefs[arg->belief].belief, arg->true_type, arg->distance, arg->gap};
  return e;
}

}  // namespace detail

/// Δ_NFG(ε; π): worst payoff gap over true types y⋆ ∈ Θ and beliefs whose mean
/// lies within ε of y⋆ in ℓ1.
inline GapEntry payoff_gap_nfg(const PayoffMatrix& a, const HypothesisSet& theta, const StrategyMap& pi,
                               double eps, const GapSearch& search = {}) {
  if (!(eps >= 0.0)) throw std::invalid_argument("payoff_gap_nfg: ε must be ≥ 0");
  const HypothesisSet members = materialize(theta, a);
  const double eps_values[] = {eps};
  const auto beliefs = detail::gap_beliefs(members, eps_values, search);
  const auto scored = detail::score_candidates(a, members, pi, beliefs);
  return detail::gap_at(eps, beliefs, scored, search);
}

inline std::vector<double> default_eps_grid(double eta, std::size_t points = 21) {
  std::vector<double> g;
  for (std::size_t i = 0; i < points; ++i) g.push_back(eta * static_cast<double>(i) / static_cast<double>(points - 1));
  return g;
}

/// Opportunity Δ(0), risk max_ε Δ(ε), and the sampled curve.
inline GapReport opportunity_risk_nfg(const PayoffMatrix& a, const HypothesisSet& theta, const StrategyMap& pi,
                                      std::vector<double> eps_grid, const GapSearch& search = {}) {
  const HypothesisSet members = materialize(theta, a);
  const double eta = theta_stats(members, a).eta;
  eps_grid.push_back(0.0);
  eps_grid.push_back(eta);
  std::sort(eps_grid.begin(), eps_grid.end());
  eps_grid.erase(std::unique(eps_grid.begin(), eps_grid.end()), eps_grid.end());
  for (double e : eps_grid)
    if (!(e >= 0.0)) throw std::invalid_argument("opportunity_risk_nfg: negative ε in grid");

  const auto beliefs = detail::gap_beliefs(members, eps_grid, search);
  const auto scored = detail::score_candidates(a, members, pi, beliefs);

  GapReport rep;
  rep.search = search.describe();
  for (double e : eps_grid) rep.curve.push_back(detail::gap_at(e, beliefs, scored, search));
  rep.opportunity = rep.curve.front().value;
  rep.opportunity_witness = rep.curve.front().witness;
  const GapEntry global = detail::gap_at(std::numeric_limits<double>::infinity(), beliefs, scored, search);
  rep.risk = global.value;
  rep.risk_witness = global.witness;
  return rep;
}

inline GapReport opportunity_risk_nfg(const PayoffMatrix& a, const HypothesisSet& theta, const StrategyMap& pi) {
  const double eta = theta_stats(materialize(theta, a), a).eta;
  return opportunity_risk_nfg(a, theta, pi, default_eps_grid(eta));
}

}  // namespace beliefsafe
