#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "beliefsafe/behavior.hpp"
#include "beliefsafe/casestudies.hpp"
#include "beliefsafe/random.hpp"
#include "beliefsafe/sbg.hpp"

namespace beliefsafe {

class ingest_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GridBounds {
  double lat_min = -19.5, lat_max = -18.0;
  double lon_min = 25.8, lon_max = 27.5;

  void validate() const {
    if (!(lat_min < lat_max && lon_min < lon_max)) throw std::invalid_argument("GridBounds: empty box");
  }
};

/// Rainy seasons run Oct Y – Mar Y+1 and carry label Y.
struct SeasonKey {
  int year = 0;
  bool rainy = false;

  int order() const noexcept { return year * 2 + (rainy ? 1 : 0); }
  std::string label() const { return std::to_string(year) + (rainy ? "-rainy" : "-dry"); }
  friend bool operator==(const SeasonKey&, const SeasonKey&) = default;
  friend bool operator<(const SeasonKey& a, const SeasonKey& b) { return a.order() < b.order(); }
};

inline SeasonKey season_of(int year, int month) {
  if (month >= 4 && month <= 9) return {year, false};
  return month >= 10 ? SeasonKey{year, true} : SeasonKey{year - 1, true};
}

struct MovementRecord {
  int year = 0, month = 0, day = 0;
  std::string animal_id;
  double lat = 0.0, lon = 0.0;
};

struct GridWorld {
  static constexpr std::size_t kStates = 16;
  std::size_t grid_rows = 3, grid_cols = 3;
  std::vector<SeasonKey> seasons;
  std::vector<std::vector<double>> counts;  // [state][cell], cell = lat_bucket * cols + lon_bucket
  std::vector<std::string> warnings;

  std::size_t cells() const noexcept { return grid_rows * grid_cols; }

  void validate() const {
    if (seasons.size() != kStates || counts.size() != kStates) throw std::invalid_argument("GridWorld: need 16 states");
    for (const auto& row : counts) {
      if (row.size() != cells()) throw dimension_error("GridWorld: cell count mismatch");
      for (double c : row)
        if (c < 0.0 || c != std::floor(c)) throw std::invalid_argument("GridWorld: counts must be nonnegative integers");
    }
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i)
    if (i == line.size() || line[i] == ',') {
      out.push_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  return out;
}

template <class T>
inline bool parse_number(std::string_view s, T& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

inline bool parse_date(std::string_view s, int& y, int& m, int& d) {
  if (s.size() < 10 || s[4] != '-' || s[7] != '-') return false;
  if (!parse_number(s.substr(0, 4), y) || !parse_number(s.substr(5, 2), m) || !parse_number(s.substr(8, 2), d))
    return false;
  if (m < 1 || m > 12 || d < 1 || d > 31) return false;
  if (s.size() > 10 && s[10] != ' ' && s[10] != 'T') return false;
  return true;
}

inline std::size_t bucket(double v, double lo, double hi, std::size_t n) {
  if (v == hi) return n - 1;
  return std::min(n - 1, static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(n)));
}

}  // namespace detail

/// Parses one data row; nullopt (with a reason) on malformed input.
inline std::optional<MovementRecord> parse_movement_row(std::string_view line, std::string& why) {
  const auto f = detail::split_csv(line);
  if (f.size() != 4) {
    why = "expected 4 fields, got " + std::to_string(f.size());
    return std::nullopt;
  }
  MovementRecord r;
  if (!detail::parse_date(f[0], r.year, r.month, r.day)) {
    why = "bad timestamp '" + std::string(f[0]) + "'";
    return std::nullopt;
  }
  if (f[1].empty()) {
    why = "empty animal_id";
    return std::nullopt;
  }
  r.animal_id = std::string(f[1]);
  if (!detail::parse_number(f[2], r.lat) || !detail::parse_number(f[3], r.lon) || !std::isfinite(r.lat) ||
      !std::isfinite(r.lon)) {
    why = "bad coordinates";
    return std::nullopt;
  }
  if (r.lat < -90.0 || r.lat > 90.0 || r.lon < -180.0 || r.lon > 180.0) {
    why = "coordinates out of range";
    return std::nullopt;
  }
  return r;
}

/// Seasonal mean positions per animal, bucketed into the grid. Keeps the
/// first 16 seasons in chronological order.
inline GridWorld ingest_movement_csv(std::istream& in, const GridBounds& bounds = {}, std::size_t grid_rows = 3,
                                     std::size_t grid_cols = 3) {
  bounds.validate();
  if (grid_rows == 0 || grid_cols == 0) throw std::invalid_argument("ingest_movement_csv: empty grid");
  GridWorld w;
  w.grid_rows = grid_rows;
  w.grid_cols = grid_cols;
  std::string line;
  if (!std::getline(in, line)) throw ingest_error("ingest_movement_csv: missing header");
  const auto header = detail::split_csv(line);
  const std::vector<std::string_view> expected{"timestamp", "animal_id", "lat", "lon"};
  if (header != expected) throw ingest_error("ingest_movement_csv: header must be timestamp,animal_id,lat,lon");

  std::map<SeasonKey, std::map<std::string, std::pair<std::vector<double>, std::vector<double>>>> buckets;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    std::string why;
    const auto r = parse_movement_row(line, why);
    if (!r) {
      w.warnings.push_back("line " + std::to_string(line_no) + ": " + why + " (skipped)");
      continue;
    }
    auto& slot = buckets[season_of(r->year, r->month)][r->animal_id];
    slot.first.push_back(r->lat);
    slot.second.push_back(r->lon);
  }
  if (buckets.size() < GridWorld::kStates) {
    std::string found;
    for (const auto& [k, _] : buckets) found += (found.empty() ? "" : ", ") + k.label();
    throw ingest_error("ingest_movement_csv: need 16 seasons, found " + std::to_string(buckets.size()) + " [" + found +
                       "]");
  }
  // Sorted sums keep the result independent of row order.
  auto mean = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  for (auto& [key, animals] : buckets) {
    if (w.seasons.size() == GridWorld::kStates) break;
    std::vector<double> row(w.cells(), 0.0);
    for (auto& [id, pos] : animals) {
      const double lat = mean(pos.first), lon = mean(pos.second);
      if (lat < bounds.lat_min || lat > bounds.lat_max || lon < bounds.lon_min || lon > bounds.lon_max) {
        w.warnings.push_back("season " + key.label() + ": animal " + id + " mean outside grid (excluded)");
        continue;
      }
      const std::size_t i = detail::bucket(lat, bounds.lat_min, bounds.lat_max, grid_rows);
      const std::size_t j = detail::bucket(lon, bounds.lon_min, bounds.lon_max, grid_cols);
      row[i * grid_cols + j] += 1.0;
    }
    w.seasons.push_back(key);
    w.counts.push_back(std::move(row));
  }
  return w;
}

inline GridWorld ingest_movement_csv(const std::string& path, const GridBounds& bounds = {},
                                     std::size_t grid_rows = 3, std::size_t grid_cols = 3) {
  std::ifstream in(path);
  if (!in) throw ingest_error("ingest_movement_csv: cannot open " + path);
  return ingest_movement_csv(in, bounds, grid_rows, grid_cols);
}

/// Defender is the agent, attacker the opponent. `attacker_reward` shares the
/// game's (state, defender, attacker) layout.
struct SecurityGame {
  StochasticGame game;
  std::vector<double> attacker_reward;
  GridWorld world;

  double attacker(std::size_t s, std::size_t d, std::size_t a) const {
    return attacker_reward[(s * game.agent_actions() + d) * game.opponent_actions() + a];
  }
};

inline double defender_payoff(double n_same, double n_att, bool same) { return same ? n_same : -n_att; }
inline double attacker_payoff(double n_att, bool same) { return same ? -2.0 : n_att; }

/// Season transition row: uniform over opposite-season states, plus
/// `boost` on the next opposite-season state in chronological order.
inline std::vector<double> season_transition_row(const GridWorld& w, std::size_t s, double boost) {
  const std::size_t n = w.seasons.size();
  std::vector<double> p(n, 0.0);
  std::optional<std::size_t> adjacent;
  for (std::size_t k = 1; k <= n; ++k) {
    const std::size_t t = (s + k) % n;
    if (w.seasons[t].rainy != w.seasons[s].rainy) {
      p[t] = 1.0;
      if (!adjacent) adjacent = t;
    }
  }
  if (!adjacent) throw std::invalid_argument("season_transition_row: no opposite-season state");
  p[*adjacent] += boost;
  double sum = 0.0;
  for (double v : p) sum += v;
  for (double& v : p) {
    v /= sum;
    if (v < 0.0) throw std::logic_error("season_transition_row: negative probability");
  }
  return p;
}

inline SecurityGame build_green_security_game(const GridWorld& w, double adjacency_boost = 0.05, double gamma = 0.9) {
  w.validate();
  if (!(adjacency_boost >= 0.0)) throw std::invalid_argument("build_green_security_game: boost must be ≥ 0");
  const std::size_t n = w.seasons.size(), c = w.cells();
  std::vector<double> def(n * c * c), att(n * c * c), trans(n * c * c * n);
  double r_max = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    const auto row = season_transition_row(w, s, adjacency_boost);
    for (std::size_t cell = 0; cell < c; ++cell) r_max = std::max(r_max, w.counts[s][cell]);
    for (std::size_t d = 0; d < c; ++d)
      for (std::size_t a = 0; a < c; ++a) {
        const std::size_t idx = (s * c + d) * c + a;
        def[idx] = defender_payoff(w.counts[s][d], w.counts[s][a], d == a);
        att[idx] = attacker_payoff(w.counts[s][a], d == a);
        std::copy(row.begin(), row.end(), trans.begin() + static_cast<std::ptrdiff_t>(idx * n));
      }
  }
  return {StochasticGame(n, c, c, std::move(def), std::move(trans), gamma, r_max), std::move(att), w};
}

/// Attacker-side type context: own = attacker, other = defender.
inline TypeContext attacker_context(const SecurityGame& sg, std::uint64_t seed) {
  const auto& g = sg.game;
  TypeContext ctx;
  ctx.states = g.states();
  ctx.own_actions = g.opponent_actions();
  ctx.other_actions = g.agent_actions();
  ctx.counts = sg.world.counts;
  ctx.seed = seed;
  for (std::size_t s = 0; s < g.states(); ++s) {
    std::vector<double> own(ctx.own_actions * ctx.other_actions), other(ctx.other_actions * ctx.own_actions);
    for (std::size_t d = 0; d < g.agent_actions(); ++d)
      for (std::size_t a = 0; a < g.opponent_actions(); ++a) {
        own[a * ctx.other_actions + d] = sg.attacker(s, d, a);
        other[d * ctx.own_actions + a] = g.reward(s, d, a);
      }
    ctx.own_payoff.emplace_back(ctx.own_actions, ctx.other_actions, std::move(own));
    ctx.other_payoff.emplace_back(ctx.other_actions, ctx.own_actions, std::move(other));
  }
  return ctx;
}

inline std::vector<TypeEntry> six_types_security(const SecurityGame& sg, std::uint64_t seed = 11,
                                                 const NeuroTypeConfig& neuro = {}) {
  const TypeContext ctx = attacker_context(sg, seed);
  std::vector<TypeEntry> out;
  for (int k = 1; k <= 4; ++k) out.push_back({"type" + std::to_string(k), markovian_type(k, ctx)});
  out.push_back({"type5_lft", lft_security(ctx)});
  out.push_back({"type6_neuro", coevolved_type(sg.game, sg.attacker_reward, ctx, neuro)});
  return out;
}

/// Kernel over the stationary types, optionally with nominal projections of
/// the history-dependent ones appended.
inline StrategyKernel kernel_from_types(const std::vector<TypeEntry>& types, bool include_projections = false) {
  std::vector<std::string> names;
  std::vector<StationaryPolicy> k;
  for (const auto& t : types)
    if (include_projections || is_stationary(t.spec)) {
      names.push_back(t.name);
      k.push_back(nominal_kernel(t.spec));
    }
  return StrategyKernel(std::move(names), std::move(k));
}

struct SynthConfig {
  std::uint64_t seed = 2009;
  std::size_t animals = 32;
  int first_year = 2009;
  std::size_t years = 8;
  std::size_t fixes_per_season = 18;
  double step_sd = 0.01;       // degrees per fix
  double migrant_share = 0.1;  // chance an animal spends a season outside the box
  GridBounds bounds;
};

/// Seasonal random walks from April of the first year to March after the last;
/// each season shifts every home range by a season-dependent drift.
inline std::string synth_movement_data(const SynthConfig& cfg = {}) {
  cfg.bounds.validate();
  Rng rng(cfg.seed);
  const double lat_span = cfg.bounds.lat_max - cfg.bounds.lat_min;
  const double lon_span = cfg.bounds.lon_max - cfg.bounds.lon_min;
  std::vector<std::pair<double, double>> home(cfg.animals);
  for (auto& h : home)
    h = {cfg.bounds.lat_min + lat_span * rng.uniform(0.15, 0.85), cfg.bounds.lon_min + lon_span * rng.uniform(0.15, 0.85)};
  std::ostringstream out;
  out << "timestamp,animal_id,lat,lon\n";
  char buf[128];
  const std::size_t seasons = cfg.years * 2;
  for (std::size_t k = 0; k < seasons; ++k) {
    const bool rainy = k % 2 == 1;
    const int year = cfg.first_year + static_cast<int>(k / 2);
    const int start_month = rainy ? 10 : 4;
    const double drift_lat = (rainy ? 0.12 : -0.12) * lat_span, drift_lon = (rainy ? -0.1 : 0.1) * lon_span;
    for (std::size_t an = 0; an < cfg.animals; ++an) {
      const bool away = an != 0 && rng.uniform() < cfg.migrant_share;
      double lat = home[an].first + drift_lat * rng.uniform(0.0, 1.0);
      double lon = home[an].second + drift_lon * rng.uniform(0.0, 1.0);
      if (away) lon = cfg.bounds.lon_max + lon_span * rng.uniform(0.3, 0.6);
      else lon = std::clamp(lon, cfg.bounds.lon_min + 0.05 * lon_span, cfg.bounds.lon_max - 0.05 * lon_span);
      lat = std::clamp(lat, cfg.bounds.lat_min + 0.05 * lat_span, cfg.bounds.lat_max - 0.05 * lat_span);
      for (std::size_t f = 0; f < cfg.fixes_per_season; ++f) {
        const std::size_t month_offset = f * 6 / cfg.fixes_per_season;
        int m = start_month + static_cast<int>(month_offset), y = year;
        if (m > 12) {
          m -= 12;
          ++y;
        }
        const int day = 1 + static_cast<int>((f * 28 / cfg.fixes_per_season) % 28);
        lat += rng.normal(0.0, cfg.step_sd);
        lon += rng.normal(0.0, cfg.step_sd);
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02d %02d:00:00,E%02zu,%.6f,%.6f\n", y, m, day,
                      static_cast<int>(f % 24), an + 1, lat, lon);
        out << buf;
      }
    }
  }
  return out.str();
}

}  // namespace beliefsafe
