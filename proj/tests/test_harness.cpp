#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "beliefsafe/harness.hpp"

namespace beliefsafe {
namespace {

namespace fs = std::filesystem;

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("beliefsafe_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(const std::string& args) {
  const std::string cmd = std::string(BELIEFSAFE_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::size_t data_rows(const std::string& csv) {
  std::istringstream in(csv);
  std::size_t n = 0;
  bool header = false;
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("# meta:", 0) == 0) continue;
    if (!header) {
      header = true;
      continue;
    }
    ++n;
  }
  return n;
}

TEST(LambdaGrid, Parse) {
  const auto g = parse_lambda_grid("0:1:0.1");
  ASSERT_EQ(g.size(), 11u);
  EXPECT_DOUBLE_EQ(g.front(), 0.0);
  EXPECT_NEAR(g.back(), 1.0, 1e-12);
  EXPECT_EQ(parse_lambda_grid("0.2,0.5"), (std::vector<double>{0.2, 0.5}));
  EXPECT_THROW(parse_lambda_grid("0:1"), config_error);
  EXPECT_THROW(parse_lambda_grid("a,b"), config_error);
}

TEST(Config, Validate) {
  ExperimentConfig c;
  c.lambda_grid = {0.0, 1.5};
  EXPECT_THROW(c.validate(), config_error);
  c.lambda_grid = {0.5};
  c.gamma = 1.0;
  EXPECT_THROW(c.validate(), config_error);
  c.gamma = 0.9;
  EXPECT_NO_THROW(c.validate());
}

TEST(Summarize, MeanSdCi) {
  const auto s = summarize({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_NEAR(s.sd, std::sqrt(5.0 / 3.0), 1e-12);
  EXPECT_NEAR(s.ci, 1.96 * s.sd / 2.0, 1e-12);
}

TEST(TradeoffNfg, MatchingPennies) {
  ExperimentConfig c;
  c.command = "tradeoff-nfg";
  c.lambda_grid = {0.0, 1.0};
  c.runs = 200;
  c.deterministic = true;
  const Table t = run_tradeoff_nfg(c);
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_NEAR(t.number(0, "exact_opportunity"), 1.0, 1e-9);
  EXPECT_NEAR(t.number(0, "exact_risk"), 1.0, 1e-9);
  EXPECT_NEAR(t.number(1, "exact_opportunity"), 0.0, 1e-9);
  EXPECT_NEAR(t.number(1, "exact_risk"), 2.0, 1e-9);
}

TEST(TradeoffNfg, AmpTracksLowerLine) {
  ExperimentConfig c;
  c.game = "amp";
  c.lambda_grid = {0.25, 0.5, 0.75};
  c.runs = 10;
  const Table t = run_tradeoff_nfg(c);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const double lam = c.lambda_grid[r];
    EXPECT_NEAR(t.number(r, "exact_opportunity"), 1 - lam, 1e-6);
    EXPECT_NEAR(t.number(r, "exact_risk"), 1 + lam, 1e-6);
  }
}

TEST(TradeoffNfg, CiShrinksWithRuns) {
  ExperimentConfig c;
  c.lambda_grid = default_lambda_grid();
  c.seed = 9;
  auto mean_ci = [&](std::size_t runs) {
    c.runs = runs;
    const Table t = run_tradeoff_nfg(c);
    double s = 0;
    for (std::size_t r = 0; r < t.rows.size(); ++r) s += t.number(r, "risk_ci");
    return s / static_cast<double>(t.rows.size());
  };
  EXPECT_LT(mean_ci(1000), mean_ci(100));
}

TEST(TradeoffSbg, StatelessReduction) {
  ExperimentConfig c;
  c.command = "tradeoff-sbg";
  c.policy = "blend";
  c.lambda_grid = {0.0, 0.5, 1.0};
  c.runs = 5;
  c.horizon = 5;
  const Table t = run_tradeoff_sbg(c);
  c.runs = 10;
  const Table n = run_tradeoff_nfg(c);
  for (std::size_t k = 0; k < 3; ++k) {
    std::size_t row = 0;
    while (t.number(row, "lambda") != c.lambda_grid[k]) ++row;
    EXPECT_NEAR(t.number(row, "beta") * 0.1, n.number(k, "exact_opportunity"), 1e-7);
    EXPECT_NEAR(t.number(row, "delta") * 0.1, n.number(k, "exact_risk"), 1e-7);
  }
}

TEST(BoundCurves, Shape) {
  const auto grid = default_lambda_grid();
  const Table t = emit_bound_curves({0.5, 0.9}, 1.0, 0.0, grid);
  ASSERT_EQ(t.rows.size(), 2 * grid.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    EXPECT_LE(t.number(r, "lower_opportunity"), t.number(r, "upper_opportunity") + 1e-12);
    EXPECT_LE(t.number(r, "lower_risk"), t.number(r, "upper_risk") + 1e-12);
    if (t.number(r, "lambda") == 1.0) {
      EXPECT_EQ(t.number(r, "upper_opportunity"), 0.0);
      EXPECT_EQ(t.number(r, "lower_opportunity"), 0.0);
    }
  }
}

TEST(Render, CsvAndJson) {
  Table t;
  t.columns = {"a", "b"};
  t.rows = {{1.5, std::string("x,y")}, {std::monostate{}, 2.0}};
  t.meta = {{"seed", "7"}};
  const auto csv = render_csv(t);
  EXPECT_EQ(csv.rfind("# meta: seed=7\na,b\n", 0), 0u);
  EXPECT_NE(csv.find("\"x,y\""), std::string::npos);
  const auto j = json::parse(render_json(t));
  EXPECT_EQ(j["rows"][0]["a"], 1.5);
  EXPECT_TRUE(j["rows"][1]["a"].is_null());
  EXPECT_EQ(j["meta"]["seed"], "7");
}

TEST(Io, TypesRoundTrip) {
  const auto inst = mp_amp_instances(11, [] {
    NeuroTypeConfig q;
    q.generations = 1;
    return q;
  }());
  const json j = types_to_json(inst.types);
  const auto back = types_from_json(j);
  ASSERT_EQ(back.size(), inst.types.size());
  EXPECT_EQ(types_to_json(back), j);
  for (std::size_t i = 0; i < back.size(); ++i) EXPECT_EQ(nominal_kernel(back[i].spec), nominal_kernel(inst.types[i].spec));
}

TEST(Io, GameRoundTrip) {
  const auto g = StochasticGame(2, 1, 2, {0.5, -0.5, 1.0, 0.0}, {0.3, 0.7, 1, 0, 0, 1, 0.5, 0.5}, 0.8, 1.0);
  const auto back = sbg_from_json(to_json(g));
  EXPECT_EQ(back.rewards(), g.rewards());
  EXPECT_EQ(back.transitions(), g.transitions());
  EXPECT_EQ(back.gamma(), g.gamma());
  const auto p = StationaryPolicy::constant(2, {0.25, 0.75});
  EXPECT_EQ(policy_from_json(to_json(p)), p);
  EXPECT_THROW(sbg_from_json(json::parse("{\"states\": 1}")), std::exception);
}

TEST(Cli, TradeoffNfg) {
  const auto out = scratch() / "mp.csv";
  EXPECT_EQ(cli("tradeoff-nfg --game mp --lambda-grid 0:1:0.1 --runs 1000 --seed 7 --out " + out.string()), 0);
  EXPECT_EQ(data_rows(slurp(out)), 11u);
}

TEST(Cli, Bounds) {
  const auto out = scratch() / "b.csv";
  EXPECT_EQ(cli("bounds --gamma 0.5 --r-max 1 --nu 0 --out " + out.string()), 0);
  EXPECT_EQ(data_rows(slurp(out)), 11u);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(cli("tradeoff-nfg --game mp"), 1);
  EXPECT_EQ(cli("tradeoff-nfg --no-such-flag --out " + (scratch() / "x.csv").string()), 1);
  EXPECT_EQ(cli("tradeoff-nfg --lambda-grid 0:2:1 --out " + (scratch() / "x.csv").string()), 1);
  EXPECT_EQ(cli("tradeoff-nfg --game /no/such/game.json --out " + (scratch() / "x.csv").string()), 1);
}

TEST(Cli, DeterministicBytes) {
  const auto a = scratch() / "d1.csv", b = scratch() / "d2.csv";
  const std::string args = "tradeoff-nfg --game amp --runs 50 --deterministic --seed 3 --out ";
  ASSERT_EQ(cli(args + a.string()), 0);
  ASSERT_EQ(cli(args + b.string()), 0);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_EQ(slurp(a).find("timestamp"), std::string::npos);
}

TEST(Cli, SynthData) {
  const auto a = scratch() / "s1.csv", b = scratch() / "s2.csv";
  ASSERT_EQ(cli("synth-data --seed 4 --out " + a.string()), 0);
  ASSERT_EQ(cli("synth-data --seed 4 --out " + b.string()), 0);
  EXPECT_EQ(slurp(a), slurp(b));
}

}  // namespace
}  // namespace beliefsafe
