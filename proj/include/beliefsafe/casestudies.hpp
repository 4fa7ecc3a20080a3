#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "beliefsafe/behavior.hpp"
#include "beliefsafe/sbg.hpp"
#include "beliefsafe/strategy.hpp"

namespace beliefsafe {

/// Row-major 2×2 rank tables: row player's then column player's, each a
/// permutation of 1..4.
using OrdinalCode = std::array<int, 8>;

struct OrdinalGame2x2 {
  std::array<int, 4> row_payoffs{};
  std::array<int, 4> col_payoffs{};
  OrdinalCode canonical_id{};
  std::size_t orbit_size = 0;
};

namespace detail {

inline OrdinalCode swap_rows(const OrdinalCode& c) {
  return {c[2], c[3], c[0], c[1], c[6], c[7], c[4], c[5]};
}
inline OrdinalCode swap_cols(const OrdinalCode& c) {
  return {c[1], c[0], c[3], c[2], c[5], c[4], c[7], c[6]};
}
/// Exchange the players: the new row player is the old column player.
inline OrdinalCode transpose_players(const OrdinalCode& c) {
  return {c[4], c[6], c[5], c[7], c[0], c[2], c[1], c[3]};
}

}  // namespace detail

inline std::vector<OrdinalCode> ordinal_orbit(const OrdinalCode& c) {
  std::vector<OrdinalCode> out;
  for (int t = 0; t < 2; ++t)
    for (int r = 0; r < 2; ++r)
      for (int k = 0; k < 2; ++k) {
        OrdinalCode g = c;
        if (t) g = detail::transpose_players(g);
        if (r) g = detail::swap_rows(g);
        if (k) g = detail::swap_cols(g);
        out.push_back(g);
      }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline OrdinalCode canonical_ordinal(const OrdinalCode& c) { return ordinal_orbit(c).front(); }

inline std::vector<std::array<int, 4>> rank_permutations() {
  std::vector<std::array<int, 4>> out;
  std::array<int, 4> p{1, 2, 3, 4};
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

/// One representative per symmetry class, in canonical order.
inline std::vector<OrdinalGame2x2> enumerate_ordinal_2x2(std::size_t* raw_count = nullptr) {
  std::map<OrdinalCode, std::size_t> classes;
  std::size_t raw = 0;
  const auto perms = rank_permutations();
  for (const auto& r : perms)
    for (const auto& c : perms) {
      ++raw;
      const OrdinalCode code{r[0], r[1], r[2], r[3], c[0], c[1], c[2], c[3]};
      ++classes[canonical_ordinal(code)];
    }
  if (raw_count) *raw_count = raw;
  std::vector<OrdinalGame2x2> out;
  for (const auto& [code, n] : classes) {
    OrdinalGame2x2 g;
    std::copy(code.begin(), code.begin() + 4, g.row_payoffs.begin());
    std::copy(code.begin() + 4, code.end(), g.col_payoffs.begin());
    g.canonical_id = code;
    g.orbit_size = n;
    out.push_back(g);
  }
  return out;
}

inline PayoffMatrix row_matrix(const OrdinalGame2x2& g) {
  return PayoffMatrix(2, 2, {double(g.row_payoffs[0]), double(g.row_payoffs[1]), double(g.row_payoffs[2]),
                             double(g.row_payoffs[3])});
}

/// Column player's payoffs with the column player as the row index.
inline PayoffMatrix col_matrix_own(const OrdinalGame2x2& g) {
  return PayoffMatrix(2, 2, {double(g.col_payoffs[0]), double(g.col_payoffs[2]), double(g.col_payoffs[1]),
                             double(g.col_payoffs[3])});
}

inline std::string ordinal_label(const OrdinalCode& c) {
  std::string s;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i == 4) s += '/';
    s += static_cast<char>('0' + c[i]);
  }
  return s;
}

struct NeuroTypeConfig {
  std::size_t population = 10;
  std::size_t generations = 20;
  std::uint64_t seed = 7;
  CoevolveConfig coevolve;
};

/// Type context for a column player in a normal-form game with row payoffs
/// `a` and column payoffs `b_own` (column player as row index).
inline TypeContext nfg_column_context(const PayoffMatrix& a, const PayoffMatrix& b_own, std::uint64_t seed) {
  TypeContext ctx;
  ctx.states = 1;
  ctx.own_actions = a.cols();
  ctx.other_actions = a.rows();
  ctx.own_payoff = {b_own};
  ctx.other_payoff = {a};
  ctx.seed = seed;
  return ctx;
}

/// Fittest column network after co-evolving against row networks.
inline NeuroSpec coevolved_type(const StochasticGame& game, std::vector<double> col_reward, const TypeContext& ctx,
                                const NeuroTypeConfig& cfg) {
  Population row = random_population(cfg.population, ctx.states, ctx.other_actions, ctx.own_actions,
                                     mix_seed(cfg.seed, 1));
  Population col = random_population(cfg.population, ctx.states, ctx.own_actions, ctx.other_actions,
                                     mix_seed(cfg.seed, 2));
  const CoevolveGame cg{game, std::move(col_reward)};
  CoevolveResult res = coevolve(std::move(row), std::move(col), cg, cfg.generations, mix_seed(cfg.seed, 3),
                                cfg.coevolve);
  if (cfg.generations == 0) {
    Rng rng(mix_seed(cfg.seed, 4));
    detail::evaluate(res.row, res.col, cg, cfg.coevolve, rng);
  }
  return res.col.members[fittest(res.col)];
}

/// Types 1–4 (Markovian), 5 (LFT) and 6 (co-evolved network) for a column
/// player of a two-action normal-form game.
inline std::vector<TypeEntry> six_types_nfg(const PayoffMatrix& a, const PayoffMatrix& b_own,
                                            std::uint64_t seed = 11, const NeuroTypeConfig& neuro = {}) {
  const TypeContext ctx = nfg_column_context(a, b_own, seed);
  std::vector<TypeEntry> out;
  for (int k = 1; k <= 4; ++k) out.push_back({"type" + std::to_string(k), markovian_type(k, ctx)});
  out.push_back({"type5_lft", lft_nfg(ctx)});
  std::vector<double> col_reward(a.rows() * a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) col_reward[i * a.cols() + j] = b_own(j, i);
  out.push_back({"type6_neuro", coevolved_type(StochasticGame::stateless(a, 0.5, std::max(a.max_norm(), b_own.max_norm())),
                                               std::move(col_reward), ctx, neuro)});
  return out;
}

/// Hypothesis set formed by the stationary members of a type list.
inline HypothesisSet markovian_hypotheses(const std::vector<TypeEntry>& types) {
  std::vector<MixedStrategy> m;
  for (const auto& t : types)
    if (is_stationary(t.spec)) m.push_back(MixedStrategy(std::get<MarkovianSpec>(t.spec).table[0]));
  return HypothesisSet(std::move(m));
}

struct MpAmpInstances {
  PayoffMatrix mp;
  PayoffMatrix amp;
  HypothesisSet theta;            // Markovian types 1–4
  std::vector<TypeEntry> types;   // all six, against MP
};

inline MpAmpInstances mp_amp_instances(std::uint64_t seed = 11, const NeuroTypeConfig& neuro = {}) {
  const PayoffMatrix mp{{1.0, -1.0}, {-1.0, 1.0}};
  const PayoffMatrix amp = mp.shifted(0.2);
  auto types = six_types_nfg(mp, mp.transposed().scaled(-1.0), seed, neuro);
  HypothesisSet theta = markovian_hypotheses(types);
  return {mp, amp, std::move(theta), std::move(types)};
}

}  // namespace beliefsafe
