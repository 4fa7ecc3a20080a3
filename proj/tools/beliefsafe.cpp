#include <cstdio>
#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "beliefsafe/harness.hpp"

namespace {

using namespace beliefsafe;

struct Flags {
  std::string game = "mp";
  std::string theta;
  std::string types;
  std::string data;
  std::string policy = "value";
  std::string lambda_grid = "0:1:0.1";
  std::string gamma_list = "0.9";
  std::size_t runs = 100;
  std::size_t horizon = 100;
  std::uint64_t seed = 7;
  double r_max = 1.0;
  double nu = 0.0;
  std::string out;
  std::string format = "csv";
  bool deterministic = false;
  std::size_t animals = 32;
  std::size_t years = 8;
};

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ',');) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(p, &used);
    } catch (const std::exception&) {
      throw config_error("bad number '" + p + "'");
    }
    if (used != p.size()) throw config_error("bad number '" + p + "'");
    out.push_back(v);
  }
  if (out.empty()) throw config_error("empty list");
  return out;
}

ExperimentConfig make_config(const std::string& command, const Flags& f) {
  ExperimentConfig c;
  c.command = command;
  c.game = f.game;
  c.theta = f.theta;
  c.types = f.types;
  c.data = f.data;
  c.policy = f.policy;
  c.lambda_grid = parse_lambda_grid(f.lambda_grid);
  c.runs = f.runs;
  c.horizon = f.horizon;
  c.seed = f.seed;
  c.gamma = parse_list(f.gamma_list).front();
  c.deterministic = f.deterministic;
  c.validate();
  return c;
}

void write_table(const Table& t, const Flags& f) {
  write_atomic(f.out, f.format == "json" ? render_json(t) : render_csv(t));
  std::printf("wrote %zu rows to %s\n", t.rows.size(), f.out.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  Flags f;
  CLI::App app{"Opportunity/risk experiments for games against opponents of uncertain type"};
  app.require_subcommand(1);

  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", f.out, "output path")->required();
    sub->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_flag("--deterministic", f.deterministic, "omit the timestamp metadata line");
    sub->add_option("--seed", f.seed, "base seed");
  };
  auto experiment = [&](CLI::App* sub) {
    common(sub);
    sub->add_option("--lambda-grid", f.lambda_grid, "lo:hi:step (inclusive) or a comma list");
    sub->add_option("--runs", f.runs, "sampled runs per cell");
    sub->add_option("--horizon", f.horizon, "episode length");
    sub->add_option("--gamma", f.gamma_list, "discount factor");
    sub->add_option("--theta", f.theta, "hypothesis set: simplex or a JSON file");
    sub->add_option("--types", f.types, "type-set JSON file");
  };

  auto* nfg = app.add_subcommand("tradeoff-nfg", "λ sweep in a normal-form game");
  experiment(nfg);
  nfg->add_option("--game", f.game, "mp, amp or a game JSON file");

  auto* sbg = app.add_subcommand("tradeoff-sbg", "λ sweep in a stochastic Bayesian game");
  experiment(sbg);
  sbg->add_option("--game", f.game, "mp, amp, security or an SBG JSON file");
  sbg->add_option("--policy", f.policy, "value or blend")->check(CLI::IsMember({"value", "blend"}));
  sbg->add_option("--data", f.data, "movement CSV for the security game");

  auto* bounds = app.add_subcommand("bounds", "stochastic-game bound curves");
  common(bounds);
  bounds->add_option("--gamma", f.gamma_list, "comma list of discount factors");
  bounds->add_option("--r-max", f.r_max, "reward bound");
  bounds->add_option("--nu", f.nu, "game value");
  bounds->add_option("--lambda-grid", f.lambda_grid, "lo:hi:step (inclusive) or a comma list");

  auto* topo = app.add_subcommand("topology", "exact tradeoff over the ordinal 2x2 classes");
  common(topo);
  topo->add_option("--lambda-grid", f.lambda_grid, "lo:hi:step (inclusive) or a comma list");

  auto* sec = app.add_subcommand("security-game", "λ sweep in the green security game");
  experiment(sec);
  sec->add_option("--data", f.data, "movement CSV (synthetic data when omitted)");
  sec->add_option("--policy", f.policy, "value or blend")->check(CLI::IsMember({"value", "blend"}));

  auto* synth = app.add_subcommand("synth-data", "write synthetic movement data");
  synth->add_option("--out", f.out, "output path")->required();
  synth->add_option("--seed", f.seed, "generator seed");
  synth->add_option("--animals", f.animals, "number of animals");
  synth->add_option("--years", f.years, "number of years");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (nfg->parsed()) {
      write_table(run_tradeoff_nfg(make_config("tradeoff-nfg", f)), f);
    } else if (sbg->parsed()) {
      write_table(run_tradeoff_sbg(make_config("tradeoff-sbg", f)), f);
    } else if (sec->parsed()) {
      ExperimentConfig c = make_config("security-game", f);
      c.game = "security";
      write_table(run_tradeoff_sbg(c), f);
    } else if (bounds->parsed()) {
      ExperimentConfig c;
      c.command = "bounds";
      c.deterministic = f.deterministic;
      c.lambda_grid = parse_lambda_grid(f.lambda_grid);
      c.validate();
      Table t = emit_bound_curves(parse_list(f.gamma_list), f.r_max, f.nu, c.lambda_grid);
      t.meta = {{"command", "bounds"}, {"gamma", f.gamma_list}, {"r_max", detail::format_number(f.r_max)},
                {"nu", detail::format_number(f.nu)}, {"git_describe", BELIEFSAFE_GIT_DESCRIBE}};
      write_table(t, f);
    } else if (topo->parsed()) {
      write_table(run_topology(make_config("topology", f)), f);
    } else if (synth->parsed()) {
      SynthConfig sc;
      sc.seed = f.seed;
      sc.animals = f.animals;
      sc.years = f.years;
      if (sc.animals == 0 || sc.years == 0) throw config_error("animals and years must be ≥ 1");
      write_atomic(f.out, synth_movement_data(sc));
      std::printf("wrote synthetic movement data to %s\n", f.out.c_str());
    }
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const bound_domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const format_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
