#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "beliefsafe/behavior.hpp"
#include "beliefsafe/sbg.hpp"
#include "beliefsafe/strategy.hpp"

namespace beliefsafe {

using json = nlohmann::json;

class format_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline json to_json(const PayoffMatrix& a) {
  json rows = json::array();
  for (std::size_t i = 0; i < a.rows(); ++i) rows.push_back(std::vector<double>(a.row(i).begin(), a.row(i).end()));
  return rows;
}

inline PayoffMatrix payoff_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw format_error("payoffs: expected a nonempty array of rows");
  return PayoffMatrix::from_rows(j.get<std::vector<std::vector<double>>>());
}

inline json to_json(const HypothesisSet& theta) {
  if (theta.is_full_simplex()) return "simplex";
  json out = json::array();
  for (const auto& m : theta.members()) out.push_back(m.probs());
  return out;
}

inline HypothesisSet theta_from_json(const json& j, std::size_t dimension) {
  if (j.is_string()) {
    if (j.get<std::string>() != "simplex") throw format_error("theta: unknown keyword " + j.get<std::string>());
    return HypothesisSet::full_simplex(dimension);
  }
  std::vector<MixedStrategy> m;
  for (const auto& row : j) m.emplace_back(row.get<std::vector<double>>());
  HypothesisSet theta(std::move(m));
  if (theta.dimension() != dimension) throw format_error("theta: dimension does not match the game");
  return theta;
}

struct NfgFile {
  PayoffMatrix payoffs;
  std::optional<HypothesisSet> theta;
};

inline json to_json(const NfgFile& f) {
  json j{{"kind", "nfg"}, {"payoffs", to_json(f.payoffs)}};
  if (f.theta) j["theta"] = to_json(*f.theta);
  return j;
}

inline NfgFile nfg_from_json(const json& j) {
  if (j.value("kind", "nfg") != "nfg") throw format_error("game file: kind must be nfg");
  NfgFile f{payoff_from_json(j.at("payoffs")), std::nullopt};
  if (j.contains("theta")) f.theta = theta_from_json(j["theta"], f.payoffs.cols());
  return f;
}

inline json to_json(const StochasticGame& g) {
  const std::size_t n = g.states(), a = g.agent_actions(), b = g.opponent_actions();
  json r = json::array(), p = json::array();
  for (std::size_t s = 0; s < n; ++s) {
    json rs = json::array(), ps = json::array();
    for (std::size_t i = 0; i < a; ++i) {
      json ri = json::array(), pi = json::array();
      for (std::size_t k = 0; k < b; ++k) {
        ri.push_back(g.reward(s, i, k));
        const auto nx = g.next(s, i, k);
        pi.push_back(std::vector<double>(nx.begin(), nx.end()));
      }
      rs.push_back(ri);
      ps.push_back(pi);
    }
    r.push_back(rs);
    p.push_back(ps);
  }
  return {{"kind", "sbg"}, {"states", n},   {"agent_actions", a}, {"opponent_actions", b},
          {"gamma", g.gamma()}, {"r_max", g.r_max()}, {"reward", r},  {"transition", p}};
}

inline StochasticGame sbg_from_json(const json& j) {
  if (j.value("kind", "sbg") != "sbg") throw format_error("game file: kind must be sbg");
  const std::size_t n = j.at("states"), a = j.at("agent_actions"), b = j.at("opponent_actions");
  std::vector<double> r, p;
  const auto& rj = j.at("reward");
  const auto& pj = j.at("transition");
  if (rj.size() != n || pj.size() != n) throw format_error("sbg: reward/transition state count mismatch");
  for (std::size_t s = 0; s < n; ++s) {
    if (rj[s].size() != a || pj[s].size() != a) throw format_error("sbg: agent action count mismatch");
    for (std::size_t i = 0; i < a; ++i) {
      if (rj[s][i].size() != b || pj[s][i].size() != b) throw format_error("sbg: opponent action count mismatch");
      for (std::size_t k = 0; k < b; ++k) {
        r.push_back(rj[s][i][k].get<double>());
        const auto row = pj[s][i][k].get<std::vector<double>>();
        if (row.size() != n) throw format_error("sbg: transition row length mismatch");
        p.insert(p.end(), row.begin(), row.end());
      }
    }
  }
  return StochasticGame(n, a, b, std::move(r), std::move(p), j.at("gamma").get<double>(), j.at("r_max").get<double>());
}

inline json to_json(const StationaryPolicy& p) { return p.table(); }

inline StationaryPolicy policy_from_json(const json& j) {
  return StationaryPolicy(j.get<std::vector<std::vector<double>>>());
}

inline json to_json(const TypeEntry& t) {
  json j{{"name", t.name}};
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, MarkovianSpec>) {
          j["kind"] = "markovian";
          j["table"] = to_json(s.table);
        } else if constexpr (std::is_same_v<T, LftSpec>) {
          j["kind"] = "lft";
          j["mode"] = s.mode == TriggerMode::window_count ? "window" : "fraction";
          j["window"] = s.window;
          j["threshold_count"] = s.threshold_count;
          j["threshold_fraction"] = s.threshold_fraction;
          j["trigger_action"] = s.trigger_action;
          j["preferred"] = to_json(s.preferred);
          j["punishment"] = to_json(s.punishment);
        } else {
          j["kind"] = "neuro";
          j["window"] = s.window;
          j["states"] = s.states;
          j["own_actions"] = s.own_actions;
          j["other_actions"] = s.other_actions;
          j["hidden"] = s.hidden;
          j["weights"] = s.weights;
        }
      },
      t.spec);
  return j;
}

inline TypeEntry type_from_json(const json& j) {
  const std::string kind = j.at("kind");
  TypeEntry t{j.at("name").get<std::string>(), MarkovianSpec{}};
  if (kind == "markovian") {
    t.spec = MarkovianSpec{policy_from_json(j.at("table"))};
  } else if (kind == "lft") {
    LftSpec s;
    const std::string mode = j.value("mode", "window");
    if (mode != "window" && mode != "fraction") throw format_error("lft: mode must be window or fraction");
    s.mode = mode == "window" ? TriggerMode::window_count : TriggerMode::history_fraction;
    s.window = j.value("window", std::size_t{4});
    s.threshold_count = j.value("threshold_count", std::size_t{3});
    s.threshold_fraction = j.value("threshold_fraction", 0.5);
    s.trigger_action = j.at("trigger_action").get<std::vector<std::size_t>>();
    s.preferred = policy_from_json(j.at("preferred"));
    s.punishment = policy_from_json(j.at("punishment"));
    if (s.window == 0) throw format_error("lft: window must be ≥ 1");
    if (s.trigger_action.size() != s.preferred.states() || s.punishment.states() != s.preferred.states())
      throw format_error("lft: per-state tables disagree");
    t.spec = std::move(s);
  } else if (kind == "neuro") {
    NeuroSpec s{j.at("window"), j.at("states"), j.at("own_actions"), j.at("other_actions"), j.at("hidden"),
                j.at("weights").get<std::vector<double>>()};
    s.validate();
    t.spec = std::move(s);
  } else {
    throw format_error("type " + t.name + ": unknown kind " + kind);
  }
  return t;
}

inline json types_to_json(const std::vector<TypeEntry>& types) {
  json arr = json::array();
  for (const auto& t : types) arr.push_back(to_json(t));
  return {{"types", arr}};
}

inline std::vector<TypeEntry> types_from_json(const json& j) {
  std::vector<TypeEntry> out;
  for (const auto& t : j.at("types")) out.push_back(type_from_json(t));
  return out;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw format_error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw format_error(path + ": " + e.what());
  }
}

/// Write to a sibling temp file, then rename over the target.
inline void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

}  // namespace beliefsafe
