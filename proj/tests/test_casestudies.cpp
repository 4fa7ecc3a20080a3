#include <gtest/gtest.h>

#include <algorithm>
#include <cstdio>
#include <tuple>
#include <set>
#include <sstream>

#include "beliefsafe/casestudies.hpp"
#include "beliefsafe/security.hpp"

namespace beliefsafe {
namespace {

TEST(Ordinal, Counts) {
  std::size_t raw = 0;
  const auto classes = enumerate_ordinal_2x2(&raw);
  EXPECT_EQ(raw, 576u);
  EXPECT_EQ(classes.size(), 78u);
  std::size_t total = 0;
  for (const auto& g : classes) total += g.orbit_size;
  EXPECT_EQ(total, 576u);
}

TEST(Ordinal, PrisonersDilemmaPresent) {
  const OrdinalCode pd{3, 1, 4, 2, 3, 4, 1, 2};
  const auto id = canonical_ordinal(pd);
  bool found = false;
  for (const auto& g : enumerate_ordinal_2x2()) found = found || g.canonical_id == id;
  EXPECT_TRUE(found);
}

TEST(Ordinal, CanonicalInvariantOnOrbit) {
  const OrdinalCode c{1, 4, 2, 3, 2, 1, 4, 3};
  const auto id = canonical_ordinal(c);
  for (const auto& g : ordinal_orbit(c)) EXPECT_EQ(canonical_ordinal(g), id);
}

TEST(MpAmp, Instances) {
  NeuroTypeConfig quick;
  quick.generations = 2;
  const auto inst = mp_amp_instances(11, quick);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(inst.amp(i, j), inst.mp(i, j) + 0.2, 1e-15);
  const auto st = theta_stats(inst.theta, inst.mp);
  EXPECT_NEAR(st.eta, 2.0, 1e-12);
  ASSERT_TRUE(st.kappa);
  EXPECT_NEAR(*st.kappa, 1.0, 1e-12);
  EXPECT_NEAR(st.mu, 1.0, 1e-12);
  EXPECT_NEAR(st.nu, 0.0, 1e-12);
  const auto sa = theta_stats(inst.theta, inst.amp);
  EXPECT_NEAR(sa.mu, 1.2, 1e-12);
  EXPECT_NEAR(sa.nu, 0.2, 1e-12);
  EXPECT_EQ(inst.types.size(), 6u);
}

// One fix per animal per season over eight years.
std::string movement_csv(const std::vector<std::tuple<std::string, double, double>>& first_season) {
  std::string out = "timestamp,animal_id,lat,lon\n";
  char buf[128];
  for (int y = 2009; y < 2017; ++y)
    for (int m : {6, 11}) {
      std::snprintf(buf, sizeof buf, "%04d-%02d-10 12:00:00,A,-18.75,26.65\n", y, m);
      out += buf;
      if (y == 2009 && m == 6)
        for (const auto& [id, lat, lon] : first_season) {
          std::snprintf(buf, sizeof buf, "2009-06-11 12:00:00,%s,%.4f,%.4f\n", id.c_str(), lat, lon);
          out += buf;
        }
    }
  return out;
}

GridWorld ingest(const std::string& csv) {
  std::istringstream in(csv);
  return ingest_movement_csv(in);
}

TEST(Ingest, SeasonOf) {
  EXPECT_EQ(season_of(2010, 2), (SeasonKey{2009, true}));
  EXPECT_EQ(season_of(2010, 10), (SeasonKey{2010, true}));
  EXPECT_EQ(season_of(2010, 4), (SeasonKey{2010, false}));
}

TEST(Ingest, SingleAnimal) {
  const auto w = ingest(movement_csv({}));
  ASSERT_EQ(w.seasons.size(), 16u);
  for (std::size_t c = 0; c < 9; ++c) EXPECT_EQ(w.counts[0][c], c == 4 ? 1.0 : 0.0);
  EXPECT_FALSE(w.seasons[0].rainy);
  EXPECT_TRUE(w.seasons[1].rainy);
}

TEST(Ingest, TwoAnimals) {
  const auto w = ingest(movement_csv({{"B", -19.4, 25.9}}));
  EXPECT_EQ(w.counts[0][0], 1.0);
  EXPECT_EQ(w.counts[0][4], 1.0);
  EXPECT_EQ(w.counts[1][0], 0.0);
}

TEST(Ingest, OutOfBoundsExcluded) {
  const auto w = ingest(movement_csv({{"C", -17.5, 26.0}}));
  double total = 0;
  for (double c : w.counts[0]) total += c;
  EXPECT_EQ(total, 1.0);
  EXPECT_FALSE(w.warnings.empty());
}

TEST(Ingest, RowOrderInvariant) {
  const std::string csv = synth_movement_data();
  std::istringstream in(csv);
  std::string header, line;
  std::getline(in, header);
  std::vector<std::string> rows;
  while (std::getline(in, line)) rows.push_back(line);
  std::reverse(rows.begin(), rows.end());
  std::string shuffled = header + "\n";
  for (const auto& r : rows) shuffled += r + "\n";
  EXPECT_EQ(ingest(csv).counts, ingest(shuffled).counts);
}

TEST(Ingest, TooFewSeasons) {
  const std::string csv = "timestamp,animal_id,lat,lon\n2009-06-10 12:00:00,A,-18.75,26.65\n";
  EXPECT_THROW(ingest(csv), ingest_error);
  EXPECT_THROW(ingest("time,id,lat,lon\n"), ingest_error);
}

TEST(SecurityGame, Payoffs) {
  EXPECT_EQ(defender_payoff(5, 5, true), 5.0);
  EXPECT_EQ(attacker_payoff(5, true), -2.0);
  EXPECT_EQ(defender_payoff(7, 3, false), -3.0);
  EXPECT_EQ(attacker_payoff(3, false), 3.0);

  GridWorld w = ingest(movement_csv({}));
  w.counts[0] = {0, 0, 3, 0, 5, 0, 0, 0, 0};
  const auto sg = build_green_security_game(w);
  EXPECT_EQ(sg.game.reward(0, 4, 4), 5.0);
  EXPECT_EQ(sg.attacker_reward[(0 * 9 + 4) * 9 + 4], -2.0);
  EXPECT_EQ(sg.game.reward(0, 4, 2), -3.0);
  EXPECT_EQ(sg.attacker_reward[(0 * 9 + 4) * 9 + 2], 3.0);
}

TEST(SecurityGame, TransitionsAlternateSeasons) {
  const auto sg = build_green_security_game(ingest(synth_movement_data()));
  const auto& w = sg.world;
  for (std::size_t s = 0; s < 16; ++s) {
    const auto row = sg.game.next(s, 0, 0);
    double other = 0;
    for (std::size_t t = 0; t < 16; ++t) {
      if (w.seasons[t].rainy == w.seasons[s].rainy) EXPECT_EQ(row[t], 0.0);
      else other += row[t];
    }
    EXPECT_NEAR(other, 1.0, 1e-12);
  }
}

TEST(Synth, Properties) {
  const auto a = synth_movement_data();
  EXPECT_EQ(a, synth_movement_data());
  SynthConfig other;
  other.seed = 1;
  EXPECT_NE(a, synth_movement_data(other));
  const auto w = ingest(a);
  EXPECT_EQ(w.seasons.size(), 16u);
  for (const auto& row : w.counts) {
    double total = 0;
    for (double c : row) total += c;
    EXPECT_LE(total, 32.0);
    EXPECT_GT(total, 0.0);
  }
}

TEST(SecurityTypes, SixTypesAndKernel) {
  const auto sg = build_green_security_game(ingest(synth_movement_data()));
  NeuroTypeConfig quick;
  quick.generations = 1;
  const auto types = six_types_security(sg, 11, quick);
  EXPECT_EQ(types.size(), 6u);
  const auto k = kernel_from_types(types);
  EXPECT_EQ(k.types(), 4u);
  EXPECT_EQ(kernel_from_types(types, true).types(), 6u);
  EXPECT_NO_THROW(k.check_game(sg.game));
}

}  // namespace
}  // namespace beliefsafe
