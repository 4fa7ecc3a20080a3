#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "beliefsafe/maximin.hpp"
#include "beliefsafe/nfg.hpp"
#include "beliefsafe/random.hpp"
#include "beliefsafe/strategy.hpp"

namespace beliefsafe {

class convergence_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Discounted two-sided stochastic game from the agent's perspective.
/// Opponent actions are joint actions of all other players.
class StochasticGame {
 public:
  StochasticGame() = default;

  StochasticGame(std::size_t states, std::size_t agent_actions, std::size_t opponent_actions,
                 std::vector<double> reward, std::vector<double> transition, double gamma, double r_max)
      : states_(states),
        agent_actions_(agent_actions),
        opponent_actions_(opponent_actions),
        reward_(std::move(reward)),
        transition_(std::move(transition)),
        gamma_(gamma),
        r_max_(r_max) {
    if (states_ == 0 || agent_actions_ == 0 || opponent_actions_ == 0)
      throw dimension_error("StochasticGame: empty state or action set");
    if (reward_.size() != states_ * agent_actions_ * opponent_actions_)
      throw dimension_error("StochasticGame: reward table size mismatch");
    if (transition_.size() != states_ * agent_actions_ * opponent_actions_ * states_)
      throw dimension_error("StochasticGame: transition table size mismatch");
    if (!(gamma_ > 0.0 && gamma_ < 1.0)) throw std::invalid_argument("StochasticGame: γ must lie in (0,1)");
    if (!(r_max_ >= 0.0) || !std::isfinite(r_max_)) throw std::invalid_argument("StochasticGame: bad r_max");
    for (double r : reward_)
      if (!std::isfinite(r) || std::abs(r) > r_max_ + 1e-12)
        throw std::invalid_argument("StochasticGame: reward exceeds r_max");
    for (std::size_t s = 0; s < states_; ++s)
      for (std::size_t a = 0; a < agent_actions_; ++a)
        for (std::size_t b = 0; b < opponent_actions_; ++b)
          if (!detail::is_distribution(next(s, a, b)))
            throw std::invalid_argument("StochasticGame: transition row (" + std::to_string(s) + "," +
                                        std::to_string(a) + "," + std::to_string(b) + ") is not a distribution");
  }

  /// One-state game with payoff matrix `a`; r_max defaults to ‖A‖_max.
  static StochasticGame stateless(const PayoffMatrix& a, double gamma, std::optional<double> r_max = std::nullopt) {
    return StochasticGame(1, a.rows(), a.cols(), a.entries(), std::vector<double>(a.rows() * a.cols(), 1.0), gamma,
                          r_max.value_or(a.max_norm()));
  }

  std::size_t states() const noexcept { return states_; }
  std::size_t agent_actions() const noexcept { return agent_actions_; }
  std::size_t opponent_actions() const noexcept { return opponent_actions_; }
  double gamma() const noexcept { return gamma_; }
  double r_max() const noexcept { return r_max_; }
  const std::vector<double>& rewards() const noexcept { return reward_; }
  const std::vector<double>& transitions() const noexcept { return transition_; }

  double reward(std::size_t s, std::size_t a, std::size_t b) const {
    return reward_[(s * agent_actions_ + a) * opponent_actions_ + b];
  }

  std::span<const double> next(std::size_t s, std::size_t a, std::size_t b) const {
    return {transition_.data() + ((s * agent_actions_ + a) * opponent_actions_ + b) * states_, states_};
  }

 private:
  std::size_t states_ = 0, agent_actions_ = 0, opponent_actions_ = 0;
  std::vector<double> reward_;
  std::vector<double> transition_;
  double gamma_ = 0.5;
  double r_max_ = 0.0;
};

/// Per-state action distributions; used for the agent policy π and for an
/// opponent strategy σ alike.
class StationaryPolicy {
 public:
  StationaryPolicy() = default;

  explicit StationaryPolicy(std::vector<std::vector<double>> table) : table_(std::move(table)) {
    if (table_.empty()) throw dimension_error("StationaryPolicy: no states");
    const std::size_t n = table_.front().size();
    for (std::size_t s = 0; s < table_.size(); ++s) {
      if (table_[s].size() != n) throw dimension_error("StationaryPolicy: ragged action sets");
      if (!detail::is_distribution(table_[s]))
        throw std::invalid_argument("StationaryPolicy: state " + std::to_string(s) + " is not a distribution");
    }
  }

  static StationaryPolicy constant(std::size_t states, const std::vector<double>& dist) {
    return StationaryPolicy(std::vector<std::vector<double>>(states, dist));
  }

  static StationaryPolicy deterministic(std::size_t actions, const std::vector<std::size_t>& choice) {
    std::vector<std::vector<double>> t;
    for (std::size_t c : choice) t.push_back(MixedStrategy::pure(actions, c).probs());
    return StationaryPolicy(std::move(t));
  }

  std::size_t states() const noexcept { return table_.size(); }
  std::size_t actions() const { return table_.front().size(); }
  const std::vector<double>& operator[](std::size_t s) const { return table_.at(s); }
  const std::vector<std::vector<double>>& table() const noexcept { return table_; }

  friend bool operator==(const StationaryPolicy&, const StationaryPolicy&) = default;

 private:
  std::vector<std::vector<double>> table_;
};

using AgentPolicy = StationaryPolicy;
using ValueFunction = std::vector<double>;

/// σ: (type, state) → distribution over opponent joint actions. Distinct types
/// may share a kernel.
class StrategyKernel {
 public:
  StrategyKernel() = default;

  StrategyKernel(std::vector<std::string> names, std::vector<StationaryPolicy> kernels)
      : names_(std::move(names)), kernels_(std::move(kernels)) {
    if (kernels_.empty()) throw std::invalid_argument("StrategyKernel: no types");
    if (names_.size() != kernels_.size()) throw dimension_error("StrategyKernel: name count mismatch");
    for (const auto& k : kernels_)
      if (k.states() != kernels_.front().states() || k.actions() != kernels_.front().actions())
        throw dimension_error("StrategyKernel: kernels disagree on shape");
    for (std::size_t i = 0; i < names_.size(); ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (names_[i] == names_[j]) throw std::invalid_argument("StrategyKernel: duplicate type name " + names_[i]);
  }

  std::size_t types() const noexcept { return kernels_.size(); }
  std::size_t states() const { return kernels_.front().states(); }
  std::size_t actions() const { return kernels_.front().actions(); }
  const std::string& name(std::size_t t) const { return names_.at(t); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const StationaryPolicy& operator[](std::size_t t) const { return kernels_.at(t); }

  std::optional<std::size_t> index_of(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == name) return i;
    return std::nullopt;
  }

  /// d(θ, θ′) = max_s ‖σ(s;θ) − σ(s;θ′)‖₁.
  double distance(std::size_t t1, std::size_t t2) const {
    double d = 0.0;
    for (std::size_t s = 0; s < states(); ++s)
      d = std::max(d, detail::l1_distance(kernels_.at(t1)[s], kernels_.at(t2)[s]));
    return d;
  }

  void check_game(const StochasticGame& g) const {
    if (states() != g.states() || actions() != g.opponent_actions())
      throw dimension_error("StrategyKernel: shape does not match game");
  }

 private:
  std::vector<std::string> names_;
  std::vector<StationaryPolicy> kernels_;
};

struct IterationOptions {
  double tolerance = 1e-10;
  std::size_t max_sweeps = 100'000;
};

/// Sup-norm residual of each sweep, for contraction checks.
struct IterationTrace {
  std::vector<double> residuals;
};

namespace detail {

inline double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

inline void check_policy_shape(const StationaryPolicy& p, std::size_t states, std::size_t actions, const char* what) {
  if (p.states() != states || p.actions() != actions)
    throw dimension_error(std::string(what) + ": policy shape does not match game");
}

}  // namespace detail

/// V^{π,σ} by fixed-point iteration from V = 0.
inline ValueFunction policy_evaluation(const StochasticGame& g, const AgentPolicy& pi, const StationaryPolicy& sigma,
                                       const IterationOptions& opt = {}, IterationTrace* trace = nullptr) {
  detail::check_policy_shape(pi, g.states(), g.agent_actions(), "policy_evaluation(π)");
  detail::check_policy_shape(sigma, g.states(), g.opponent_actions(), "policy_evaluation(σ)");
  const std::size_t n = g.states();
  std::vector<double> r(n, 0.0), p(n * n, 0.0);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t a = 0; a < g.agent_actions(); ++a) {
      if (pi[s][a] == 0.0) continue;
      for (std::size_t b = 0; b < g.opponent_actions(); ++b) {
        const double w = pi[s][a] * sigma[s][b];
        if (w == 0.0) continue;
        r[s] += w * g.reward(s, a, b);
        const auto nx = g.next(s, a, b);
        for (std::size_t t = 0; t < n; ++t) p[s * n + t] += w * nx[t];
      }
    }
  ValueFunction v(n, 0.0), next(n, 0.0);
  for (std::size_t sweep = 0; sweep < opt.max_sweeps; ++sweep) {
    for (std::size_t s = 0; s < n; ++s) {
      double acc = 0.0;
      for (std::size_t t = 0; t < n; ++t) acc += p[s * n + t] * v[t];
      next[s] = r[s] + g.gamma() * acc;
    }
    const double res = detail::sup_diff(next, v);
    v.swap(next);
    if (trace) trace->residuals.push_back(res);
    if (res <= opt.tolerance) return v;
  }
  throw convergence_error("policy_evaluation: sweep cap reached");
}

/// Q(s,a) = E_{b∼σ(s)}[r(s,a,b) + γ·E_{s′}V(s′)].
inline std::vector<double> q_values(const StochasticGame& g, const StationaryPolicy& sigma, const ValueFunction& v,
                                    std::size_t s) {
  std::vector<double> q(g.agent_actions(), 0.0);
  for (std::size_t a = 0; a < g.agent_actions(); ++a)
    for (std::size_t b = 0; b < g.opponent_actions(); ++b) {
      const double w = sigma[s][b];
      if (w == 0.0) continue;
      const auto nx = g.next(s, a, b);
      double ev = 0.0;
      for (std::size_t t = 0; t < g.states(); ++t) ev += nx[t] * v[t];
      q[a] += w * (g.reward(s, a, b) + g.gamma() * ev);
    }
  return q;
}

struct OptimalValue {
  ValueFunction values;
  AgentPolicy greedy;
};

/// V^{⋆,σ} by value iteration, with the lowest-index greedy policy.
inline OptimalValue optimal_value(const StochasticGame& g, const StationaryPolicy& sigma,
                                  const IterationOptions& opt = {}, IterationTrace* trace = nullptr) {
  detail::check_policy_shape(sigma, g.states(), g.opponent_actions(), "optimal_value(σ)");
  const std::size_t n = g.states();
  ValueFunction v(n, 0.0), next(n, 0.0);
  for (std::size_t sweep = 0; sweep < opt.max_sweeps; ++sweep) {
    for (std::size_t s = 0; s < n; ++s) {
      const auto q = q_values(g, sigma, v, s);
      next[s] = *std::max_element(q.begin(), q.end());
    }
    const double res = detail::sup_diff(next, v);
    v.swap(next);
    if (trace) trace->residuals.push_back(res);
    if (res <= opt.tolerance) {
      std::vector<std::size_t> choice(n);
      for (std::size_t s = 0; s < n; ++s) choice[s] = argmax_row(q_values(g, sigma, v, s));
      return {v, AgentPolicy::deterministic(g.agent_actions(), choice)};
    }
  }
  throw convergence_error("optimal_value: sweep cap reached");
}

/// R_V(s): entry (a, b) = r(s,a,b) + γ·Σ_{s′} p(s′|s,a,b)·V(s′).
inline PayoffMatrix r_matrix(const StochasticGame& g, const ValueFunction& v, std::size_t s) {
  if (v.size() != g.states()) throw dimension_error("r_matrix: value function size mismatch");
  if (s >= g.states()) throw dimension_error("r_matrix: state out of range");
  std::vector<double> e(g.agent_actions() * g.opponent_actions());
  for (std::size_t a = 0; a < g.agent_actions(); ++a)
    for (std::size_t b = 0; b < g.opponent_actions(); ++b) {
      const auto nx = g.next(s, a, b);
      double ev = 0.0;
      for (std::size_t t = 0; t < g.states(); ++t) ev += nx[t] * v[t];
      e[a * g.opponent_actions() + b] = g.reward(s, a, b) + g.gamma() * ev;
    }
  return PayoffMatrix(g.agent_actions(), g.opponent_actions(), std::move(e));
}

struct GameValue {
  double nu = 0.0;                   // min_s of the per-state minimax value
  ValueFunction minimax_values;      // fixed point of the per-state maximin operator
  StationaryPolicy sigma_bar;        // minimizing type's distribution per state
  std::vector<std::size_t> safe_type;  // which type was selected in each state
  AgentPolicy safe_policy;           // per-state maximin mixed strategy
  ValueFunction safe_values;         // V̄ = V^{⋆,σ̄}
  double fixed_type_value = 0.0;     // min_θ min_s V^{π̄,σ(θ)}(s)
};

/// Shapley-style minimax value iteration against a finite type set, each
/// state solved as a maximin LP over the type-induced payoff columns.
inline GameValue game_value_sbg(const StochasticGame& g, const StrategyKernel& kernel,
                                const IterationOptions& opt = {}, IterationTrace* trace = nullptr) {
  kernel.check_game(g);
  const std::size_t n = g.states(), types = kernel.types();
  auto induced = [&](const ValueFunction& v, std::size_t s) {
    const PayoffMatrix r = r_matrix(g, v, s);
    std::vector<double> e(g.agent_actions() * types);
    for (std::size_t t = 0; t < types; ++t) {
      const auto col = r.times(kernel[t][s]);
      for (std::size_t a = 0; a < g.agent_actions(); ++a) e[a * types + t] = col[a];
    }
    return PayoffMatrix(g.agent_actions(), types, std::move(e));
  };

  ValueFunction v(n, 0.0), next(n, 0.0);
  bool converged = false;
  for (std::size_t sweep = 0; sweep < opt.max_sweeps && !converged; ++sweep) {
    for (std::size_t s = 0; s < n; ++s) next[s] = maximin_columns(induced(v, s)).value;
    const double res = detail::sup_diff(next, v);
    v.swap(next);
    if (trace) trace->residuals.push_back(res);
    converged = res <= opt.tolerance;
  }
  if (!converged) throw convergence_error("game_value_sbg: sweep cap reached");

  GameValue out;
  out.minimax_values = v;
  out.nu = *std::min_element(v.begin(), v.end());
  std::vector<std::vector<double>> sigma_bar(n), safe(n);
  out.safe_type.resize(n);
  for (std::size_t s = 0; s < n; ++s) {
    const PayoffMatrix m = induced(v, s);
    const MaximinResult mm = maximin_columns(m);
    const auto payoffs = m.left_times(mm.strategy.view());
    std::size_t worst = 0;
    for (std::size_t t = 1; t < types; ++t)
      if (payoffs[t] < payoffs[worst] - kTieTolerance) worst = t;
    out.safe_type[s] = worst;
    sigma_bar[s] = kernel[worst][s];
    safe[s] = mm.strategy.probs();
  }
  out.sigma_bar = StationaryPolicy(std::move(sigma_bar));
  out.safe_policy = AgentPolicy(std::move(safe));
  out.safe_values = optimal_value(g, out.sigma_bar, opt).values;
  out.fixed_type_value = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < types; ++t) {
    const auto vt = policy_evaluation(g, out.safe_policy, kernel[t], opt);
    out.fixed_type_value = std::min(out.fixed_type_value, *std::min_element(vt.begin(), vt.end()));
  }
  return out;
}

/// Deterministic argmax of λ·R_Ṽ(s)σ̃(s) + (1−λ)·R_V̄(s)σ̄(s), lowest index on ties.
inline AgentPolicy safe_exploit_policy(const StochasticGame& g, const StationaryPolicy& sigma_tilde,
                                       const ValueFunction& v_tilde, const StationaryPolicy& sigma_bar,
                                       const ValueFunction& v_bar, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("safe_exploit_policy: λ outside [0,1]");
  std::vector<std::size_t> choice(g.states());
  for (std::size_t s = 0; s < g.states(); ++s) {
    const auto exploit = r_matrix(g, v_tilde, s).times(sigma_tilde[s]);
    const auto safe = r_matrix(g, v_bar, s).times(sigma_bar[s]);
    std::vector<double> score(g.agent_actions());
    for (std::size_t a = 0; a < score.size(); ++a) score[a] = lambda * exploit[a] + (1.0 - lambda) * safe[a];
    choice[s] = argmax_row(score);
  }
  return AgentPolicy::deterministic(g.agent_actions(), choice);
}

using PolicyBuilderFn = std::function<AgentPolicy(std::size_t belief, double lambda)>;

/// Caches the safe anchor (σ̄, V̄) and per-type optimal values so that policies
/// for many (belief, λ) pairs can be built cheaply.
class SafeExploitBuilder {
 public:
  SafeExploitBuilder(const StochasticGame& g, const StrategyKernel& kernel, const IterationOptions& opt = {})
      : game_(g), kernel_(kernel), opt_(opt), value_(game_value_sbg(g, kernel, opt)) {
    for (std::size_t t = 0; t < kernel.types(); ++t) {
      auto ov = optimal_value(g, kernel[t], opt);
      optimal_.push_back(std::move(ov.values));
      greedy_.push_back(std::move(ov.greedy));
    }
  }

  AgentPolicy operator()(std::size_t belief, double lambda) const {
    if (belief >= kernel_.types()) throw std::out_of_range("safe_exploit_policy: belief type not in type set");
    return safe_exploit_policy(game_, kernel_[belief], optimal_[belief], value_.sigma_bar, value_.safe_values,
                               lambda);
  }

  /// Policy for a believed kernel outside the type set (e.g. a stationary
  /// projection of a history-dependent agent).
  AgentPolicy for_kernel(const StationaryPolicy& sigma_tilde, double lambda) const {
    const auto vt = optimal_value(game_, sigma_tilde, opt_).values;
    return safe_exploit_policy(game_, sigma_tilde, vt, value_.sigma_bar, value_.safe_values, lambda);
  }

  /// Mixed counterpart λ·greedy(σ(θ)) + (1−λ)·π̄; reduces to the normal-form
  /// λ-policy when |S| = 1.
  AgentPolicy blend(std::size_t belief, double lambda) const {
    if (belief >= kernel_.types()) throw std::out_of_range("blend: belief type not in type set");
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("blend: λ outside [0,1]");
    std::vector<std::vector<double>> t(game_.states());
    for (std::size_t s = 0; s < t.size(); ++s) {
      t[s].resize(game_.agent_actions());
      for (std::size_t a = 0; a < t[s].size(); ++a)
        t[s][a] = lambda * greedy_[belief][s][a] + (1.0 - lambda) * value_.safe_policy[s][a];
      t[s] = MixedStrategy::normalized(std::move(t[s])).probs();
    }
    return AgentPolicy(std::move(t));
  }

  AgentPolicy blend_for_kernel(const StationaryPolicy& sigma_tilde, double lambda) const {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("blend: λ outside [0,1]");
    const AgentPolicy greedy = optimal_value(game_, sigma_tilde, opt_).greedy;
    std::vector<std::vector<double>> t(game_.states());
    for (std::size_t s = 0; s < t.size(); ++s) {
      t[s].resize(game_.agent_actions());
      for (std::size_t a = 0; a < t[s].size(); ++a)
        t[s][a] = lambda * greedy[s][a] + (1.0 - lambda) * value_.safe_policy[s][a];
      t[s] = MixedStrategy::normalized(std::move(t[s])).probs();
    }
    return AgentPolicy(std::move(t));
  }

  PolicyBuilderFn blend_builder() const {
    return [this](std::size_t belief, double lambda) { return blend(belief, lambda); };
  }

  const GameValue& game_value() const noexcept { return value_; }
  const ValueFunction& optimal(std::size_t t) const { return optimal_.at(t); }
  const AgentPolicy& greedy(std::size_t t) const { return greedy_.at(t); }

 private:
  StochasticGame game_;
  StrategyKernel kernel_;
  IterationOptions opt_;
  GameValue value_;
  std::vector<ValueFunction> optimal_;
  std::vector<AgentPolicy> greedy_;
};

inline AgentPolicy safe_exploit_policy(const StochasticGame& g, const StrategyKernel& kernel, std::size_t belief,
                                       double lambda, const IterationOptions& opt = {}) {
  return SafeExploitBuilder(g, kernel, opt)(belief, lambda);
}

using PolicyBuilder = PolicyBuilderFn;

struct PairGap {
  std::size_t belief = 0;
  std::size_t truth = 0;
  double distance = 0.0;
  double gap = 0.0;
  std::size_t initial_state = 0;
};

struct SbgGap {
  double value = 0.0;
  PairGap witness;
};

struct SbgGapReport {
  double lambda = 0.0;
  double beta = 0.0;
  double delta = 0.0;
  std::vector<PairGap> per_pair;
  PairGap beta_witness;
  PairGap delta_witness;
};

namespace detail {

inline std::vector<PairGap> all_pair_gaps(const StochasticGame& g, const StrategyKernel& kernel,
                                          const PolicyBuilder& build, double lambda,
                                          const std::vector<ValueFunction>& star, const IterationOptions& opt) {
  std::vector<PairGap> out;
  for (std::size_t th = 0; th < kernel.types(); ++th) {
    const AgentPolicy pi = build(th, lambda);
    for (std::size_t ts = 0; ts < kernel.types(); ++ts) {
      const auto v = policy_evaluation(g, pi, kernel[ts], opt);
      PairGap pg{th, ts, kernel.distance(th, ts), -std::numeric_limits<double>::infinity(), 0};
      for (std::size_t s = 0; s < g.states(); ++s) {
        const double d = star[ts][s] - v[s];
        if (d > pg.gap) {
          pg.gap = d;
          pg.initial_state = s;
        }
      }
      out.push_back(pg);
    }
  }
  return out;
}

inline std::vector<ValueFunction> star_values(const StochasticGame& g, const StrategyKernel& kernel,
                                              const IterationOptions& opt) {
  std::vector<ValueFunction> star;
  for (std::size_t t = 0; t < kernel.types(); ++t) star.push_back(optimal_value(g, kernel[t], opt).values);
  return star;
}

inline SbgGap max_within(const std::vector<PairGap>& pairs, double eps) {
  SbgGap out{-std::numeric_limits<double>::infinity(), {}};
  for (const auto& p : pairs)
    if (p.distance <= eps + kProbabilityTolerance && p.gap > out.value) out = {p.gap, p};
  return out;
}

}  // namespace detail

/// Δ_SBG(ε; π) over ordered type pairs within kernel distance ε, sup over s0.
inline SbgGap payoff_gap_sbg(const StochasticGame& g, const StrategyKernel& kernel, const PolicyBuilder& build,
                             double lambda, double eps, const IterationOptions& opt = {}) {
  kernel.check_game(g);
  if (!(eps >= 0.0 && eps <= 2.0)) throw std::invalid_argument("payoff_gap_sbg: ε must lie in [0,2]");
  const auto pairs = detail::all_pair_gaps(g, kernel, build, lambda, detail::star_values(g, kernel, opt), opt);
  return detail::max_within(pairs, eps);
}

inline SbgGapReport opportunity_risk_sbg(const StochasticGame& g, const StrategyKernel& kernel,
                                         const PolicyBuilder& build, double lambda,
                                         const IterationOptions& opt = {}) {
  kernel.check_game(g);
  SbgGapReport rep;
  rep.lambda = lambda;
  rep.per_pair = detail::all_pair_gaps(g, kernel, build, lambda, detail::star_values(g, kernel, opt), opt);
  const SbgGap beta = detail::max_within(rep.per_pair, 0.0);
  const SbgGap delta = detail::max_within(rep.per_pair, 2.0);
  rep.beta = beta.value;
  rep.beta_witness = beta.witness;
  rep.delta = delta.value;
  rep.delta_witness = delta.witness;
  return rep;
}

/// Using the value-based safe/exploit policy.
inline SbgGapReport opportunity_risk_sbg(const StochasticGame& g, const StrategyKernel& kernel, double lambda,
                                         const IterationOptions& opt = {}) {
  const SafeExploitBuilder builder(g, kernel, opt);
  return opportunity_risk_sbg(g, kernel, std::cref(builder), lambda, opt);
}

/// A player in simulation: emits a distribution per step and may keep history.
class Behavior {
 public:
  virtual ~Behavior() = default;
  virtual std::vector<double> distribution(std::size_t state) = 0;
  virtual void observe(std::size_t /*state*/, std::size_t /*own*/, std::size_t /*other*/) {}
  virtual void reset() {}
};

class StationaryBehavior final : public Behavior {
 public:
  explicit StationaryBehavior(StationaryPolicy policy) : policy_(std::move(policy)) {}
  std::vector<double> distribution(std::size_t state) override { return policy_[state]; }

 private:
  StationaryPolicy policy_;
};

struct Episode {
  std::vector<std::size_t> states;
  std::vector<std::size_t> agent_actions;
  std::vector<std::size_t> opponent_actions;
  std::vector<double> rewards;
  double discounted_return = 0.0;
};

/// Rolls out `horizon` steps; both behaviors are reset first, so the result
/// depends only on the inputs and `seed`.
inline Episode simulate_episode(const StochasticGame& g, Behavior& agent, Behavior& opponent,
                                std::span<const double> initial, std::size_t horizon, std::uint64_t seed) {
  if (initial.size() != g.states() || !detail::is_distribution(initial))
    throw std::invalid_argument("simulate_episode: bad initial distribution");
  agent.reset();
  opponent.reset();
  Rng rng(seed);
  Episode ep;
  std::size_t s = rng.categorical(initial);
  double discount = 1.0;
  for (std::size_t t = 0; t < horizon; ++t) {
    const auto pa = agent.distribution(s);
    const auto pb = opponent.distribution(s);
    if (pa.size() != g.agent_actions() || pb.size() != g.opponent_actions())
      throw dimension_error("simulate_episode: behavior action count mismatch");
    const std::size_t a = rng.categorical(pa);
    const std::size_t b = rng.categorical(pb);
    const double r = g.reward(s, a, b);
    ep.states.push_back(s);
    ep.agent_actions.push_back(a);
    ep.opponent_actions.push_back(b);
    ep.rewards.push_back(r);
    ep.discounted_return += discount * r;
    discount *= g.gamma();
    agent.observe(s, a, b);
    opponent.observe(s, b, a);
    s = rng.categorical(g.next(s, a, b));
  }
  return ep;
}

}  // namespace beliefsafe
