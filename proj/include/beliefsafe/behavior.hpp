#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <memory>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "beliefsafe/maximin.hpp"
#include "beliefsafe/random.hpp"
#include "beliefsafe/sbg.hpp"
#include "beliefsafe/strategy.hpp"

namespace beliefsafe {

/// What a type needs to know about the game it plays in. "own" is the
/// modelled player, "other" is the agent facing it.
struct TypeContext {
  std::size_t states = 1;
  std::size_t own_actions = 0;
  std::size_t other_actions = 0;
  std::vector<PayoffMatrix> own_payoff;    // per state, own × other
  std::vector<PayoffMatrix> other_payoff;  // per state, other × own (the agent's rewards)
  std::vector<std::vector<double>> counts;  // per state, per own action (security variants)
  std::uint64_t seed = 0;
};

struct MarkovianSpec {
  StationaryPolicy table;
};

enum class TriggerMode { window_count, history_fraction };

struct LftSpec {
  TriggerMode mode = TriggerMode::window_count;
  std::size_t window = 4;
  std::size_t threshold_count = 3;  // fires when hits ≥ threshold_count (window mode)
  double threshold_fraction = 0.5;  // fires when hit rate > threshold_fraction (fraction mode)
  std::vector<std::size_t> trigger_action;  // per state
  StationaryPolicy preferred;
  StationaryPolicy punishment;
};

struct NeuroSpec {
  std::size_t window = 4;
  std::size_t states = 1;
  std::size_t own_actions = 2;
  std::size_t other_actions = 2;
  std::size_t hidden = 16;
  std::vector<double> weights;  // W1 (hidden×in), b1, W2 (out×hidden), b2

  std::size_t inputs() const noexcept { return window * (own_actions + 1 + other_actions + 1) + states; }
  std::size_t weight_count() const noexcept { return hidden * inputs() + hidden + own_actions * hidden + own_actions; }

  void validate() const {
    if (window == 0 || states == 0 || own_actions == 0 || other_actions == 0 || hidden == 0)
      throw dimension_error("NeuroSpec: zero-sized dimension");
    if (weights.size() != weight_count())
      throw dimension_error("NeuroSpec: expected " + std::to_string(weight_count()) + " weights, got " +
                            std::to_string(weights.size()));
  }
};

using BehaviorSpec = std::variant<MarkovianSpec, LftSpec, NeuroSpec>;

struct TypeEntry {
  std::string name;
  BehaviorSpec spec;
};

namespace detail {

inline std::vector<std::size_t> ranked_by_count(const std::vector<double>& counts) {
  std::vector<std::size_t> idx(counts.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t l, std::size_t r) { return counts[l] > counts[r]; });
  return idx;
}

inline void require_payoffs(const std::vector<PayoffMatrix>& m, const TypeContext& ctx, std::size_t rows,
                            std::size_t cols, const char* what) {
  if (m.size() != ctx.states) throw std::invalid_argument(std::string(what) + ": payoff context missing");
  for (const auto& p : m)
    if (p.rows() != rows || p.cols() != cols) throw dimension_error(std::string(what) + ": payoff shape mismatch");
}

}  // namespace detail

/// Own maximin per state.
inline StationaryPolicy own_maximin_policy(const TypeContext& ctx) {
  detail::require_payoffs(ctx.own_payoff, ctx, ctx.own_actions, ctx.other_actions, "own_maximin_policy");
  std::vector<std::vector<double>> t;
  for (const auto& m : ctx.own_payoff) t.push_back(maximin_columns(m).strategy.probs());
  return StationaryPolicy(std::move(t));
}

/// Per state, the mixed strategy minimizing the other player's best payoff.
inline StationaryPolicy punishing_policy(const TypeContext& ctx) {
  detail::require_payoffs(ctx.other_payoff, ctx, ctx.other_actions, ctx.own_actions, "punishing_policy");
  std::vector<std::vector<double>> t;
  for (const auto& m : ctx.other_payoff) t.push_back(maximin_columns(m.transposed().scaled(-1.0)).strategy.probs());
  return StationaryPolicy(std::move(t));
}

/// Types 1..4. With counts present, types 1 and 2 target the highest and
/// second-highest count actions per state; otherwise actions 0 and 1.
inline MarkovianSpec markovian_type(int kind, const TypeContext& ctx) {
  if (ctx.own_actions == 0 || ctx.states == 0) throw std::invalid_argument("markovian_type: empty context");
  switch (kind) {
    case 1:
    case 2: {
      const std::size_t rank = static_cast<std::size_t>(kind - 1);
      if (ctx.own_actions <= rank) throw std::invalid_argument("markovian_type: too few actions");
      std::vector<std::size_t> choice(ctx.states, rank);
      if (!ctx.counts.empty()) {
        if (ctx.counts.size() != ctx.states) throw std::invalid_argument("markovian_type: counts missing states");
        for (std::size_t s = 0; s < ctx.states; ++s) choice[s] = detail::ranked_by_count(ctx.counts[s]).at(rank);
      }
      return {StationaryPolicy::deterministic(ctx.own_actions, choice)};
    }
    case 3:
      return {own_maximin_policy(ctx)};
    case 4: {
      Rng rng(ctx.seed);
      std::vector<std::vector<double>> t(ctx.states, std::vector<double>(ctx.own_actions));
      for (auto& row : t) {
        for (double& w : row) w = -std::log(1.0 - rng.uniform());
        row = MixedStrategy::normalized(row).probs();
      }
      return {StationaryPolicy(std::move(t))};
    }
    default:
      throw std::invalid_argument("markovian_type: kind must be 1..4");
  }
}

/// Normal-form LFT: watch the last `window` moves, punish when action 1 was
/// chosen at least `threshold` times; otherwise play action 0.
inline LftSpec lft_nfg(const TypeContext& ctx, std::size_t window = 4, std::size_t threshold = 3) {
  if (ctx.other_actions < 2) throw std::invalid_argument("lft_nfg: other player needs ≥ 2 actions");
  if (window == 0) throw std::invalid_argument("lft_nfg: window must be ≥ 1");
  LftSpec s;
  s.mode = TriggerMode::window_count;
  s.window = window;
  s.threshold_count = threshold;
  s.trigger_action.assign(ctx.states, 1);
  s.preferred = StationaryPolicy::deterministic(ctx.own_actions, std::vector<std::size_t>(ctx.states, 0));
  s.punishment = punishing_policy(ctx);
  return s;
}

/// Security LFT: punish once the other player has covered the highest-count
/// cell in more than `fraction` of all recorded rounds.
inline LftSpec lft_security(const TypeContext& ctx, double fraction = 0.5) {
  if (ctx.counts.size() != ctx.states) throw std::invalid_argument("lft_security: counts missing");
  LftSpec s;
  s.mode = TriggerMode::history_fraction;
  s.threshold_fraction = fraction;
  std::vector<std::size_t> top(ctx.states);
  for (std::size_t st = 0; st < ctx.states; ++st) top[st] = detail::ranked_by_count(ctx.counts[st]).front();
  s.trigger_action = top;
  s.preferred = StationaryPolicy::deterministic(ctx.own_actions, top);
  s.punishment = punishing_policy(ctx);
  return s;
}

struct LftObservation {
  std::size_t state = 0;
  std::size_t other_action = 0;
};

inline bool lft_fires(const LftSpec& spec, const std::vector<LftObservation>& history) {
  auto hit = [&](const LftObservation& o) { return o.other_action == spec.trigger_action.at(o.state); };
  if (spec.mode == TriggerMode::window_count) {
    if (history.size() < spec.window) return false;
    const auto hits = std::count_if(history.end() - static_cast<std::ptrdiff_t>(spec.window), history.end(), hit);
    return static_cast<std::size_t>(hits) >= spec.threshold_count;
  }
  if (history.empty()) return false;
  const auto hits = std::count_if(history.begin(), history.end(), hit);
  return static_cast<double>(hits) > spec.threshold_fraction * static_cast<double>(history.size());
}

inline std::vector<double> lft_step(const LftSpec& spec, const std::vector<LftObservation>& history,
                                    std::size_t state) {
  return lft_fires(spec, history) ? spec.punishment[state] : spec.preferred[state];
}

/// Past (own, other) action pairs, most recent first; missing slots are null.
struct NeuroHistory {
  std::deque<std::pair<std::size_t, std::size_t>> recent;
};

inline std::vector<double> neuro_inputs(const NeuroSpec& spec, const NeuroHistory& h, std::size_t state) {
  if (state >= spec.states) throw dimension_error("neuro_inputs: state out of range");
  std::vector<double> in(spec.inputs(), 0.0);
  const std::size_t slot = spec.own_actions + 1 + spec.other_actions + 1;
  for (std::size_t k = 0; k < spec.window; ++k) {
    const std::size_t base = k * slot;
    if (k < h.recent.size()) {
      const auto [own, other] = h.recent[k];
      if (own >= spec.own_actions || other >= spec.other_actions) throw dimension_error("neuro_inputs: bad action");
      in[base + own] = 1.0;
      in[base + spec.own_actions + 1 + other] = 1.0;
    } else {
      in[base + spec.own_actions] = 1.0;
      in[base + spec.own_actions + 1 + spec.other_actions] = 1.0;
    }
  }
  in[spec.window * slot + state] = 1.0;
  return in;
}

inline std::vector<double> neuro_forward(const NeuroSpec& spec, const std::vector<double>& input) {
  spec.validate();
  const std::size_t n_in = spec.inputs();
  if (input.size() != n_in) throw dimension_error("neuro_forward: input size mismatch");
  const double* w1 = spec.weights.data();
  const double* b1 = w1 + spec.hidden * n_in;
  const double* w2 = b1 + spec.hidden;
  const double* b2 = w2 + spec.own_actions * spec.hidden;
  std::vector<double> h(spec.hidden);
  for (std::size_t j = 0; j < spec.hidden; ++j) {
    double z = b1[j];
    for (std::size_t i = 0; i < n_in; ++i) z += w1[j * n_in + i] * input[i];
    h[j] = std::tanh(z);
  }
  std::vector<double> out(spec.own_actions);
  for (std::size_t k = 0; k < out.size(); ++k) {
    double z = b2[k];
    for (std::size_t j = 0; j < spec.hidden; ++j) z += w2[k * spec.hidden + j] * h[j];
    out[k] = z;
  }
  const double peak = *std::max_element(out.begin(), out.end());
  double sum = 0.0;
  for (double& z : out) sum += (z = std::exp(z - peak));
  for (double& z : out) z /= sum;
  return out;
}

inline NeuroSpec random_neuro(std::size_t states, std::size_t own_actions, std::size_t other_actions, Rng& rng,
                              std::size_t window = 4, std::size_t hidden = 16, double scale = 0.5) {
  NeuroSpec s{window, states, own_actions, other_actions, hidden, {}};
  s.weights.resize(s.weight_count());
  for (double& w : s.weights) w = rng.normal(0.0, scale);
  return s;
}

/// Stationary stand-in used where a kernel is required: Markovian types as
/// is, LFT as its preferred strategy, Neuro as its empty-history output.
inline StationaryPolicy nominal_kernel(const BehaviorSpec& spec) {
  return std::visit(
      [](const auto& s) -> StationaryPolicy {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, MarkovianSpec>) {
          return s.table;
        } else if constexpr (std::is_same_v<T, LftSpec>) {
          return s.preferred;
        } else {
          std::vector<std::vector<double>> t;
          for (std::size_t st = 0; st < s.states; ++st) t.push_back(neuro_forward(s, neuro_inputs(s, {}, st)));
          return StationaryPolicy(std::move(t));
        }
      },
      spec);
}

inline bool is_stationary(const BehaviorSpec& spec) { return std::holds_alternative<MarkovianSpec>(spec); }

class LftBehavior final : public Behavior {
 public:
  explicit LftBehavior(LftSpec spec) : spec_(std::move(spec)) {}
  std::vector<double> distribution(std::size_t state) override { return lft_step(spec_, history_, state); }
  void observe(std::size_t state, std::size_t, std::size_t other) override { history_.push_back({state, other}); }
  void reset() override { history_.clear(); }

 private:
  LftSpec spec_;
  std::vector<LftObservation> history_;
};

class NeuroBehavior final : public Behavior {
 public:
  explicit NeuroBehavior(NeuroSpec spec) : spec_(std::move(spec)) { spec_.validate(); }
  std::vector<double> distribution(std::size_t state) override {
    return neuro_forward(spec_, neuro_inputs(spec_, history_, state));
  }
  void observe(std::size_t, std::size_t own, std::size_t other) override {
    history_.recent.emplace_front(own, other);
    if (history_.recent.size() > spec_.window) history_.recent.pop_back();
  }
  void reset() override { history_.recent.clear(); }

 private:
  NeuroSpec spec_;
  NeuroHistory history_;
};

inline std::unique_ptr<Behavior> make_behavior(const BehaviorSpec& spec) {
  return std::visit(
      [](const auto& s) -> std::unique_ptr<Behavior> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, MarkovianSpec>) return std::make_unique<StationaryBehavior>(s.table);
        else if constexpr (std::is_same_v<T, LftSpec>) return std::make_unique<LftBehavior>(s);
        else return std::make_unique<NeuroBehavior>(s);
      },
      spec);
}

struct Population {
  std::vector<NeuroSpec> members;
  std::vector<double> fitness;
  std::size_t generation = 0;
};

inline Population random_population(std::size_t size, std::size_t states, std::size_t own_actions,
                                    std::size_t other_actions, std::uint64_t seed, std::size_t window = 4,
                                    std::size_t hidden = 16) {
  Rng rng(seed);
  Population p;
  for (std::size_t i = 0; i < size; ++i)
    p.members.push_back(random_neuro(states, own_actions, other_actions, rng, window, hidden));
  p.fitness.assign(size, 0.0);
  return p;
}

/// Two-sided game for co-evolution: the row side uses `game` rewards, the
/// column side `col_reward` laid out like the game's reward table.
struct CoevolveGame {
  StochasticGame game;
  std::vector<double> col_reward;

  double col(std::size_t s, std::size_t a, std::size_t b) const {
    return col_reward[(s * game.agent_actions() + a) * game.opponent_actions() + b];
  }
};

struct CoevolveConfig {
  std::size_t horizon = 20;
  std::size_t matches = 3;  // opponents sampled per member
  double mutation_sd = 0.1;
  double mutation_rate = 0.5;
  double crossover_rate = 0.5;
  double diversity_weight = 0.01;
};

struct GenerationRecord {
  std::size_t generation = 0;
  double row_previous = 0.0, row_candidate = 0.0;
  double col_previous = 0.0, col_candidate = 0.0;
  bool row_accepted = false, col_accepted = false;
};

struct CoevolveResult {
  Population row;
  Population col;
  std::vector<GenerationRecord> history;
};

namespace detail {

inline double l2(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

inline std::vector<double> diversity(const Population& p) {
  std::vector<double> d(p.members.size(), 0.0);
  if (p.members.size() < 2) return d;
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = 0; j < d.size(); ++j)
      if (i != j) d[i] += l2(p.members[i].weights, p.members[j].weights);
    d[i] /= static_cast<double>(d.size() - 1);
  }
  return d;
}

/// Plays each member against `matches` random members of the other side and
/// fills both fitness vectors.
inline void evaluate(Population& row, Population& col, const CoevolveGame& g, const CoevolveConfig& cfg, Rng& rng) {
  std::vector<double> row_sum(row.members.size(), 0.0), col_sum(col.members.size(), 0.0);
  std::vector<std::size_t> row_n(row.members.size(), 0), col_n(col.members.size(), 0);
  const std::size_t n = g.game.states();
  std::vector<double> p0(n, 1.0 / static_cast<double>(n));
  auto play = [&](std::size_t i, std::size_t j) {
    NeuroBehavior r(row.members[i]), c(col.members[j]);
    const Episode ep = simulate_episode(g.game, r, c, p0, cfg.horizon, rng.next());
    double rs = 0.0, cs = 0.0;
    for (std::size_t t = 0; t < ep.rewards.size(); ++t) {
      rs += ep.rewards[t];
      cs += g.col(ep.states[t], ep.agent_actions[t], ep.opponent_actions[t]);
    }
    const double len = std::max<double>(1.0, static_cast<double>(ep.rewards.size()));
    row_sum[i] += rs / len;
    col_sum[j] += cs / len;
    ++row_n[i];
    ++col_n[j];
  };
  for (std::size_t i = 0; i < row.members.size(); ++i)
    for (std::size_t m = 0; m < cfg.matches; ++m) play(i, rng.index(col.members.size()));
  for (std::size_t j = 0; j < col.members.size(); ++j)
    for (std::size_t m = 0; m < cfg.matches; ++m) play(rng.index(row.members.size()), j);
  const auto rd = diversity(row), cd = diversity(col);
  row.fitness.resize(row.members.size());
  col.fitness.resize(col.members.size());
  for (std::size_t i = 0; i < row.members.size(); ++i)
    row.fitness[i] = row_sum[i] / static_cast<double>(std::max<std::size_t>(1, row_n[i])) + cfg.diversity_weight * rd[i];
  for (std::size_t j = 0; j < col.members.size(); ++j)
    col.fitness[j] = col_sum[j] / static_cast<double>(std::max<std::size_t>(1, col_n[j])) + cfg.diversity_weight * cd[j];
}

inline double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline std::size_t tournament(const Population& p, Rng& rng) {
  const std::size_t a = rng.index(p.members.size()), b = rng.index(p.members.size());
  return p.fitness[a] >= p.fitness[b] ? a : b;
}

inline Population offspring(const Population& p, const CoevolveConfig& cfg, Rng& rng) {
  Population child = p;
  for (std::size_t i = 0; i < p.members.size(); ++i) {
    NeuroSpec m = p.members[tournament(p, rng)];
    if (rng.uniform() < cfg.crossover_rate) {
      const NeuroSpec& other = p.members[tournament(p, rng)];
      for (std::size_t k = 0; k < m.weights.size(); ++k)
        if (rng.uniform() < 0.5) m.weights[k] = other.weights[k];
    }
    if (rng.uniform() < cfg.mutation_rate)
      for (double& w : m.weights) w += rng.normal(0.0, cfg.mutation_sd);
    child.members[i] = std::move(m);
  }
  return child;
}

inline std::vector<std::size_t> top_half(const Population& p) {
  std::vector<std::size_t> idx(p.members.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t l, std::size_t r) { return p.fitness[l] > p.fitness[r]; });
  idx.resize(p.members.size() / 2);
  return idx;
}

inline Population splice(const Population& before, const Population& after) {
  Population out;
  out.generation = before.generation;
  for (std::size_t i : top_half(before)) out.members.push_back(before.members[i]);
  for (std::size_t i : top_half(after)) out.members.push_back(after.members[i]);
  for (std::size_t i = 0; out.members.size() < before.members.size(); ++i) out.members.push_back(after.members[i]);
  out.fitness.assign(out.members.size(), 0.0);
  return out;
}

}  // namespace detail

/// Fitness = mean per-step payoff + diversity_weight × mean L2 distance to the
/// rest of the population. A candidate made of the top half before and the top
/// half after variation replaces a population only if its mean fitness is
/// strictly higher.
inline CoevolveResult coevolve(Population row, Population col, const CoevolveGame& g, std::size_t generations,
                               std::uint64_t seed, const CoevolveConfig& cfg = {}) {
  if (row.members.size() != col.members.size() || row.members.empty())
    throw std::invalid_argument("coevolve: populations must be nonempty and of equal size");
  if (g.col_reward.size() != g.game.rewards().size()) throw dimension_error("coevolve: column reward size mismatch");
  CoevolveResult res;
  for (std::size_t gen = 0; gen < generations; ++gen) {
    Rng rng(mix_seed(seed, gen));
    detail::evaluate(row, col, g, cfg, rng);
    Population row_next = detail::offspring(row, cfg, rng);
    Population col_next = detail::offspring(col, cfg, rng);
    detail::evaluate(row_next, col_next, g, cfg, rng);
    Population row_cand = detail::splice(row, row_next);
    Population col_cand = detail::splice(col, col_next);
    detail::evaluate(row_cand, col_cand, g, cfg, rng);

    GenerationRecord rec;
    rec.generation = gen;
    rec.row_previous = detail::mean(row.fitness);
    rec.col_previous = detail::mean(col.fitness);
    rec.row_candidate = detail::mean(row_cand.fitness);
    rec.col_candidate = detail::mean(col_cand.fitness);
    rec.row_accepted = rec.row_candidate > rec.row_previous;
    rec.col_accepted = rec.col_candidate > rec.col_previous;
    if (rec.row_accepted) row = std::move(row_cand);
    if (rec.col_accepted) col = std::move(col_cand);
    row.generation = col.generation = gen + 1;
    res.history.push_back(rec);
  }
  res.row = std::move(row);
  res.col = std::move(col);
  return res;
}

inline std::size_t fittest(const Population& p) {
  return static_cast<std::size_t>(std::max_element(p.fitness.begin(), p.fitness.end()) - p.fitness.begin());
}

}  // namespace beliefsafe
