#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "beliefsafe/bounds.hpp"
#include "beliefsafe/casestudies.hpp"
#include "beliefsafe/io.hpp"
#include "beliefsafe/nfg.hpp"
#include "beliefsafe/parallel.hpp"
#include "beliefsafe/sbg.hpp"
#include "beliefsafe/security.hpp"

#ifndef BELIEFSAFE_GIT_DESCRIBE
#define BELIEFSAFE_GIT_DESCRIBE "unknown"
#endif

namespace beliefsafe {

class config_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class envelope_violation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string command;
  std::string game = "mp";  // builtin name or JSON path
  std::string theta;        // "", "simplex" or JSON path
  std::string types;        // "" (builtin six) or JSON path
  std::string data;         // movement CSV for the security game
  std::string policy = "value";  // value | blend
  std::vector<double> lambda_grid;
  std::size_t runs = 100;
  std::size_t horizon = 100;
  std::uint64_t seed = 7;
  double gamma = 0.9;
  bool deterministic = false;

  void validate() const {
    if (lambda_grid.empty()) throw config_error("lambda grid is empty");
    for (double l : lambda_grid)
      if (!(l >= 0.0 && l <= 1.0)) throw config_error("lambda grid values must lie in [0,1]");
    if (runs < 1) throw config_error("runs must be ≥ 1");
    if (horizon < 1) throw config_error("horizon must be ≥ 1");
    if (!(gamma > 0.0 && gamma < 1.0)) throw config_error("gamma must lie in (0,1)");
    if (policy != "value" && policy != "blend") throw config_error("policy must be value or blend");
  }
};

/// "lo:hi:step" (inclusive) or a comma-separated list.
inline std::vector<double> parse_lambda_grid(const std::string& text) {
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw config_error("bad number '" + s + "' in lambda grid");
    }
    if (used != s.size()) throw config_error("bad number '" + s + "' in lambda grid");
    return v;
  };
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw config_error("lambda grid range must be lo:hi:step");
    const double lo = number(parts[0]), hi = number(parts[1]), step = number(parts[2]);
    if (!(step > 0.0) || hi < lo) throw config_error("lambda grid range needs step > 0 and hi ≥ lo");
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    for (std::size_t k = 0; k < n; ++k) out.push_back(std::min(hi, lo + static_cast<double>(k) * step));
    if (hi - out.back() > 1e-9) out.push_back(hi);
  } else {
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');) out.push_back(number(p));
  }
  for (double& l : out)
    if (std::abs(l - std::round(l * 1e12) / 1e12) < 1e-15) l = std::round(l * 1e12) / 1e12;
  return out;
}

inline std::vector<double> default_lambda_grid() { return parse_lambda_grid("0:1:0.1"); }

using Cell = std::variant<std::monostate, double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::pair<std::string, std::string>> meta;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return i;
    throw std::out_of_range("no column " + name);
  }

  double number(std::size_t row, const std::string& name) const {
    const Cell& c = rows.at(row).at(column(name));
    if (const double* d = std::get_if<double>(&c)) return *d;
    return std::numeric_limits<double>::quiet_NaN();
  }

  std::string text(std::size_t row, const std::string& name) const {
    const Cell& c = rows.at(row).at(column(name));
    if (const auto* s = std::get_if<std::string>(&c)) return *s;
    return {};
  }
};

namespace detail {

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
  return buf;
}

inline std::string csv_field(const Cell& c) {
  if (std::holds_alternative<std::monostate>(c)) return "";
  if (const double* d = std::get_if<double>(&c)) return format_number(*d);
  const std::string& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

inline std::optional<double> value_or_none(double v) {
  return std::isfinite(v) ? std::optional<double>(v) : std::nullopt;
}

}  // namespace detail

inline std::vector<std::pair<std::string, std::string>> config_meta(const ExperimentConfig& cfg) {
  std::string grid;
  for (double l : cfg.lambda_grid) grid += (grid.empty() ? "" : ",") + detail::format_number(l);
  std::vector<std::pair<std::string, std::string>> m{
      {"command", cfg.command}, {"game", cfg.game},     {"theta", cfg.theta.empty() ? "default" : cfg.theta},
      {"types", cfg.types.empty() ? "builtin" : cfg.types}, {"policy", cfg.policy},
      {"lambda_grid", grid},    {"runs", std::to_string(cfg.runs)},
      {"horizon", std::to_string(cfg.horizon)},           {"seed", std::to_string(cfg.seed)},
      {"gamma", detail::format_number(cfg.gamma)},        {"git_describe", BELIEFSAFE_GIT_DESCRIBE}};
  if (!cfg.data.empty()) m.emplace_back("data", cfg.data);
  if (!cfg.deterministic) {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    m.emplace_back("timestamp", buf);
  }
  return m;
}

inline std::string render_csv(const Table& t) {
  std::string out;
  for (const auto& [k, v] : t.meta) out += "# meta: " + k + "=" + v + "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + detail::csv_field(row[i]);
    out += "\n";
  }
  return out;
}

inline std::string render_json(const Table& t) {
  json meta = json::object();
  for (const auto& [k, v] : t.meta) meta[k] = v;
  json rows = json::array();
  for (const auto& row : t.rows) {
    json r = json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      const Cell& c = row[i];
      if (std::holds_alternative<std::monostate>(c)) r[t.columns[i]] = nullptr;
      else if (const double* d = std::get_if<double>(&c)) r[t.columns[i]] = std::isfinite(*d) ? json(*d) : json(nullptr);
      else r[t.columns[i]] = std::get<std::string>(c);
    }
    rows.push_back(std::move(r));
  }
  return json{{"meta", meta}, {"columns", t.columns}, {"rows", rows}}.dump(2) + "\n";
}

struct SampleStats {
  double mean = 0.0, sd = 0.0, ci = 0.0;
};

/// Mean, sample SD and the 1.96·SD/√n normal-approximation half-width.
inline SampleStats summarize(const std::vector<double>& xs) {
  SampleStats s;
  if (xs.empty()) return s;
  const double n = static_cast<double>(xs.size());
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / (n - 1.0));
  }
  s.ci = 1.96 * s.sd / std::sqrt(n);
  return s;
}

struct ResolvedNfg {
  std::string name;
  PayoffMatrix a;
  HypothesisSet theta;
};

inline ResolvedNfg resolve_nfg(const ExperimentConfig& cfg) {
  ResolvedNfg r;
  r.name = cfg.game;
  std::optional<HypothesisSet> file_theta;
  if (cfg.game == "mp" || cfg.game == "amp") {
    const auto inst = mp_amp_instances(cfg.seed);
    r.a = cfg.game == "mp" ? inst.mp : inst.amp;
    file_theta = inst.theta;
  } else {
    NfgFile f = nfg_from_json(read_json_file(cfg.game));
    r.a = f.payoffs;
    file_theta = f.theta;
  }
  if (cfg.theta == "simplex") {
    r.theta = HypothesisSet::full_simplex(r.a.cols());
  } else if (!cfg.theta.empty()) {
    const json j = read_json_file(cfg.theta);
    r.theta = theta_from_json(j.is_object() ? j.at("theta") : j, r.a.cols());
  } else if (file_theta) {
    r.theta = *file_theta;
  } else {
    throw config_error("game " + cfg.game + " has no theta; pass --theta");
  }
  return r;
}

inline const std::vector<std::string>& tradeoff_nfg_columns() {
  static const std::vector<std::string> c{"lambda",         "exact_opportunity", "exact_risk",       "opportunity_mean",
                                          "opportunity_sd", "opportunity_ci",    "risk_mean",        "risk_sd",
                                          "risk_ci",        "upper_opportunity", "upper_risk",       "lower_risk",
                                          "mu",             "nu",                "eta",              "kappa",
                                          "empirical_check"};
  return c;
}

/// Empirical gap samples at a witness: best payoff against y⋆ minus the
/// realized payoff of (a ∼ π(ρ), b ∼ y⋆).
inline std::vector<double> sample_gaps(const PayoffMatrix& a, const MixedStrategy& x, const MixedStrategy& y,
                                       std::size_t runs, std::uint64_t seed) {
  const auto col = a.times(y.view());
  const double best = *std::max_element(col.begin(), col.end());
  Rng rng(seed);
  std::vector<double> out(runs);
  for (auto& g : out) {
    const std::size_t i = rng.categorical(x.view());
    const std::size_t j = rng.categorical(y.view());
    g = best - a(i, j);
  }
  return out;
}

inline bool within_four_se(const SampleStats& s, double exact, std::size_t runs, double slack = 1e-9) {
  return std::abs(s.mean - exact) <= 4.0 * s.sd / std::sqrt(static_cast<double>(runs)) + slack;
}

/// λ sweep in a normal-form game: exact gaps, sampled gaps at the exact
/// witnesses, and envelope columns. Exact values above the existence envelope
/// abort the run.
inline Table run_tradeoff_nfg(const ExperimentConfig& cfg) {
  cfg.validate();
  const ResolvedNfg g = resolve_nfg(cfg);
  const GameStats st = theta_stats(g.theta, g.a);
  Table t;
  t.columns = tradeoff_nfg_columns();
  t.meta = config_meta(cfg);
  t.meta.emplace_back("gap_search", GapSearch{}.describe());
  t.rows.resize(cfg.lambda_grid.size());
  parallel_for(cfg.lambda_grid.size(), [&](std::size_t k) {
    const double lambda = cfg.lambda_grid[k];
    const LambdaPolicy pi = lambda_policy(g.a, g.theta, lambda);
    const GapReport rep = opportunity_risk_nfg(g.a, g.theta, std::cref(pi));
    const auto& members = pi.theta();
    const auto opp = summarize(sample_gaps(g.a, pi(rep.opportunity_witness.belief),
                                           members[rep.opportunity_witness.true_type], cfg.runs,
                                           mix_seed(cfg.seed, 2 * k)));
    const auto risk = summarize(sample_gaps(g.a, pi(rep.risk_witness.belief), members[rep.risk_witness.true_type],
                                            cfg.runs, mix_seed(cfg.seed, 2 * k + 1)));
    const NfgEnvelope env = nfg_envelope(st, lambda);
    if (rep.opportunity > env.upper_opportunity + 1e-8 || rep.risk > env.upper_risk + 1e-8) {
      char buf[256];
      std::snprintf(buf, sizeof buf,
                    "λ=%g: exact (opportunity, risk) = (%.9g, %.9g) exceeds the existence envelope (%.9g, %.9g)",
                    lambda, rep.opportunity, rep.risk, env.upper_opportunity, env.upper_risk);
      throw envelope_violation(buf);
    }
    std::string check = "n/a";
    if (cfg.runs >= 1000)
      check = within_four_se(opp, rep.opportunity, cfg.runs) && within_four_se(risk, rep.risk, cfg.runs)
                  ? "ok"
                  : "outside_4se";
    t.rows[k] = {lambda,
                 rep.opportunity,
                 rep.risk,
                 opp.mean,
                 opp.sd,
                 opp.ci,
                 risk.mean,
                 risk.sd,
                 risk.ci,
                 env.upper_opportunity,
                 env.upper_risk,
                 env.lower_risk_given_opportunity ? Cell(*env.lower_risk_given_opportunity) : Cell{},
                 st.mu,
                 st.nu,
                 st.eta,
                 st.kappa ? Cell(*st.kappa) : Cell{},
                 check};
  });
  return t;
}

struct ResolvedSbg {
  std::string name;
  StochasticGame game;
  std::vector<TypeEntry> types;
};

inline ResolvedSbg resolve_sbg(const ExperimentConfig& cfg) {
  ResolvedSbg r;
  r.name = cfg.game;
  if (cfg.game == "mp" || cfg.game == "amp") {
    const auto inst = mp_amp_instances(cfg.seed);
    const PayoffMatrix& a = cfg.game == "mp" ? inst.mp : inst.amp;
    r.game = StochasticGame::stateless(a, cfg.gamma);
    r.types = inst.types;
  } else if (cfg.game == "security") {
    GridWorld w;
    if (cfg.data.empty()) {
      SynthConfig sc;
      sc.seed = cfg.seed;
      std::istringstream in(synth_movement_data(sc));
      w = ingest_movement_csv(in);
    } else {
      w = ingest_movement_csv(cfg.data);
    }
    const SecurityGame sg = build_green_security_game(w, 0.05, cfg.gamma);
    r.game = sg.game;
    r.types = six_types_security(sg, cfg.seed);
  } else {
    r.game = sbg_from_json(read_json_file(cfg.game));
    if (cfg.types.empty()) throw config_error("game file " + cfg.game + " needs --types");
  }
  if (!cfg.types.empty()) r.types = types_from_json(read_json_file(cfg.types));
  if (r.types.empty()) throw config_error("type set is empty");
  return r;
}

inline const std::vector<std::string>& tradeoff_sbg_columns() {
  static const std::vector<std::string> c{
      "lambda",      "type",       "stationary",        "exact_return", "optimal_return",    "exact_gap",
      "worst_gap",   "return_mean", "return_sd",        "return_ci",    "beta",              "delta",
      "upper_opportunity", "upper_risk", "lower_opportunity", "lower_risk", "nu",            "empirical_check"};
  return c;
}

/// λ sweep in a stochastic Bayesian game. The agent believes each true type
/// (history-dependent types through their nominal projection). Exact columns
/// come from the stationary types; every type is also simulated.
inline Table run_tradeoff_sbg(const ExperimentConfig& cfg) {
  cfg.validate();
  const ResolvedSbg r = resolve_sbg(cfg);
  const StochasticGame& game = r.game;
  const StrategyKernel kernel = kernel_from_types(r.types);
  kernel.check_game(game);
  const SafeExploitBuilder builder(game, kernel);
  const bool blend = cfg.policy == "blend";
  const PolicyBuilder build = blend ? builder.blend_builder() : PolicyBuilder(std::cref(builder));
  const double nu = builder.game_value().nu;
  const std::vector<double> p0(game.states(), 1.0 / static_cast<double>(game.states()));
  auto weighted = [&](const ValueFunction& v) { return detail::dot(p0, v); };

  std::vector<std::optional<std::size_t>> kernel_index(r.types.size());
  for (std::size_t i = 0; i < r.types.size(); ++i) kernel_index[i] = kernel.index_of(r.types[i].name);

  struct LambdaSummary {
    SbgGapReport report;
    SbgEnvelope env;
  };
  std::vector<LambdaSummary> per_lambda(cfg.lambda_grid.size());
  parallel_for(cfg.lambda_grid.size(), [&](std::size_t k) {
    const double lambda = cfg.lambda_grid[k];
    per_lambda[k].report = opportunity_risk_sbg(game, kernel, build, lambda);
    per_lambda[k].env = sbg_envelopes(game.gamma(), game.r_max(), nu, lambda);
  });
  for (const auto& s : per_lambda)
    if (s.report.beta > s.env.upper_opportunity + 1e-8 || s.report.delta > s.env.upper_risk + 1e-8) {
      char buf[256];
      std::snprintf(buf, sizeof buf, "λ=%g: exact (β, δ) = (%.9g, %.9g) exceeds the existence envelope (%.9g, %.9g)",
                    s.report.lambda, s.report.beta, s.report.delta, s.env.upper_opportunity, s.env.upper_risk);
      throw envelope_violation(buf);
    }

  const double truncation = std::pow(game.gamma(), static_cast<double>(cfg.horizon)) * game.r_max() /
                            (1.0 - game.gamma());
  Table t;
  t.columns = tradeoff_sbg_columns();
  t.meta = config_meta(cfg);
  t.meta.emplace_back("initial_distribution", "uniform");
  const std::size_t n_types = r.types.size();
  t.rows.resize(cfg.lambda_grid.size() * n_types);
  parallel_for(t.rows.size(), [&](std::size_t cell) {
    const std::size_t k = cell / n_types, ti = cell % n_types;
    const double lambda = cfg.lambda_grid[k];
    const TypeEntry& type = r.types[ti];
    const auto& rep = per_lambda[k].report;
    const auto& env = per_lambda[k].env;
    AgentPolicy pi;
    if (kernel_index[ti]) pi = build(*kernel_index[ti], lambda);
    else if (blend) pi = builder.blend_for_kernel(nominal_kernel(type.spec), lambda);
    else pi = builder.for_kernel(nominal_kernel(type.spec), lambda);

    std::vector<double> returns(cfg.runs);
    Rng cell_rng(mix_seed(cfg.seed, cell));
    StationaryBehavior agent(pi);
    auto opponent = make_behavior(type.spec);
    for (auto& ret : returns)
      ret = simulate_episode(game, agent, *opponent, p0, cfg.horizon, cell_rng.next()).discounted_return;
    const SampleStats s = summarize(returns);

    Cell exact_return, optimal_return, exact_gap, worst_gap;
    std::string check = "n/a";
    if (kernel_index[ti]) {
      const std::size_t kt = *kernel_index[ti];
      const double v_pi = weighted(policy_evaluation(game, pi, kernel[kt]));
      exact_return = v_pi;
      optimal_return = weighted(builder.optimal(kt));
      double own = 0.0, worst = 0.0;
      for (const auto& p : rep.per_pair)
        if (p.truth == kt) {
          worst = std::max(worst, p.gap);
          if (p.belief == kt) own = p.gap;
        }
      exact_gap = own;
      worst_gap = worst;
      if (cfg.runs >= 1000)
        check = std::abs(s.mean - v_pi) <= 4.0 * s.sd / std::sqrt(double(cfg.runs)) + truncation + 1e-9
                    ? "ok"
                    : "outside_4se";
    }
    t.rows[cell] = {lambda,
                    type.name,
                    kernel_index[ti] ? "yes" : "no",
                    exact_return,
                    optimal_return,
                    exact_gap,
                    worst_gap,
                    s.mean,
                    s.sd,
                    s.ci,
                    rep.beta,
                    rep.delta,
                    env.upper_opportunity,
                    env.upper_risk,
                    env.lower_opportunity,
                    env.lower_risk,
                    nu,
                    check};
  });
  return t;
}

inline Table emit_bound_curves(const std::vector<double>& gammas, double r_max, double nu,
                               const std::vector<double>& lambda_grid) {
  Table t;
  t.columns = {"gamma", "lambda", "upper_opportunity", "upper_risk", "lower_opportunity", "lower_risk", "c1", "c2"};
  for (double g : gammas)
    for (double l : lambda_grid) {
      const SbgEnvelope e = sbg_envelopes(g, r_max, nu, l);
      t.rows.push_back(
          {g, l, e.upper_opportunity, e.upper_risk, e.lower_opportunity, e.lower_risk, e.constants.c1, e.constants.c2});
    }
  return t;
}

/// Column-player Markovian types 1–4 as a hypothesis set (duplicates merged).
inline HypothesisSet ordinal_hypotheses(const OrdinalGame2x2& g, std::uint64_t seed) {
  const TypeContext ctx = nfg_column_context(row_matrix(g), col_matrix_own(g), seed);
  std::optional<HypothesisSet> theta;
  for (int k = 1; k <= 4; ++k) {
    const MixedStrategy y(markovian_type(k, ctx).table[0]);
    theta = theta ? theta->with_member(y) : HypothesisSet({y});
  }
  return *theta;
}

/// Exact tradeoff for every ordinal 2×2 class. Envelope columns are reported
/// alongside, not enforced.
inline Table run_topology(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto classes = enumerate_ordinal_2x2();
  Table t;
  t.columns = {"game", "lambda", "opportunity", "risk", "upper_opportunity", "upper_risk", "within_envelope"};
  t.meta = config_meta(cfg);
  t.meta.emplace_back("classes", std::to_string(classes.size()));
  const std::size_t nl = cfg.lambda_grid.size();
  t.rows.resize(classes.size() * nl);
  parallel_for(classes.size(), [&](std::size_t c) {
    const PayoffMatrix a = row_matrix(classes[c]);
    const HypothesisSet theta = ordinal_hypotheses(classes[c], cfg.seed);
    const GameStats st = theta_stats(theta, a);
    for (std::size_t k = 0; k < nl; ++k) {
      const double lambda = cfg.lambda_grid[k];
      const LambdaPolicy pi = lambda_policy(a, theta, lambda);
      const GapReport rep = opportunity_risk_nfg(a, theta, std::cref(pi));
      const auto env = nfg_upper_bound(st.mu, st.nu, st.eta, lambda);
      const bool ok = rep.opportunity <= env.opportunity + 1e-8 && rep.risk <= env.risk + 1e-8;
      t.rows[c * nl + k] = {ordinal_label(classes[c].canonical_id), lambda, rep.opportunity, rep.risk,
                            env.opportunity, env.risk, ok ? "yes" : "no"};
    }
  });
  return t;
}

}  // namespace beliefsafe
