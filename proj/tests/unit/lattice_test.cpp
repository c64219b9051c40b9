#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "oracle.hpp"
#include "spgg/lattice.hpp"
#include "spgg/random.hpp"

using namespace spgg;

namespace {

StrategyGrid random_grid(int L, Rng& rng, double prob = 0.5) {
  StrategyGrid g(L);
  for (std::size_t i = 0; i < g.size(); ++i) g.set(i, uniform01(rng) < prob);
  return g;
}

StrategyGrid filled(int L, Strategy s) {
  StrategyGrid g(L);
  for (std::size_t i = 0; i < g.size(); ++i) g.set(i, static_cast<std::uint8_t>(s));
  return g;
}

}  // namespace

TEST(Neighbors, WrapAtCorner) {
  StrategyGrid g(3);
  auto n = neighbors(g, 0, 0);
  EXPECT_EQ(n[0], (Cell{2, 0}));
  EXPECT_EQ(n[1], (Cell{1, 0}));
  EXPECT_EQ(n[2], (Cell{0, 2}));
  EXPECT_EQ(n[3], (Cell{0, 1}));
}

TEST(Neighbors, InteriorCell) {
  StrategyGrid g(3);
  auto n = neighbors(g, 1, 1);
  EXPECT_EQ(n[0], (Cell{0, 1}));
  EXPECT_EQ(n[1], (Cell{2, 1}));
  EXPECT_EQ(n[2], (Cell{1, 0}));
  EXPECT_EQ(n[3], (Cell{1, 2}));
}

TEST(Neighbors, SideTwoIsRejected) {
  // On a 2x2 torus up and down coincide, so k = 4 distinct neighbours is impossible.
  EXPECT_EQ(((0 - 1) % 2 + 2) % 2, (0 + 1) % 2);
  EXPECT_THROW(StrategyGrid(2), std::invalid_argument);
  EXPECT_THROW(StrategyGrid(0), std::invalid_argument);
}

TEST(StrategyGridTest, RejectsNonBinaryCells) {
  EXPECT_THROW(StrategyGrid(3, std::vector<std::uint8_t>(9, 2)), std::invalid_argument);
  EXPECT_THROW(StrategyGrid(3, std::vector<std::uint8_t>(8, 0)), std::invalid_argument);
}

TEST(GroupPayoff, PaperSubstitutions) {
  EXPECT_DOUBLE_EQ(group_payoff(Strategy::kCooperate, 5, {5.0, 0.0}), 4.0);
  EXPECT_DOUBLE_EQ(group_payoff(Strategy::kDefect, 0, {3.0, 0.0}), 0.0);
  EXPECT_NEAR(group_payoff(Strategy::kCooperate, 3, {4.3, 0.0}), 1.58, 1e-12);
}

TEST(GroupPayoff, InvalidCompositions) {
  GameParams gp{4.0, 0.0};
  EXPECT_THROW(group_payoff(Strategy::kCooperate, 0, gp), std::invalid_argument);
  EXPECT_THROW(group_payoff(Strategy::kDefect, 6, gp), std::invalid_argument);
  EXPECT_THROW(group_payoff(Strategy::kDefect, -1, gp), std::invalid_argument);
}

TEST(GameParamsTest, Validation) {
  EXPECT_THROW((GameParams{1.0, 0.0}).validate(), std::invalid_argument);
  EXPECT_THROW((GameParams{3.0, -0.1}).validate(), std::invalid_argument);
  EXPECT_NO_THROW((GameParams{3.0, 0.0}).validate());
}

TEST(TotalPayoff, UniformGrids) {
  auto c = filled(6, Strategy::kCooperate);
  auto d = filled(6, Strategy::kDefect);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      EXPECT_DOUBLE_EQ(total_payoff(c, i, j, {5.0, 0.0}), 20.0);
      EXPECT_DOUBLE_EQ(total_payoff(d, i, j, {3.7, 0.0}), 0.0);
    }
  }
}

TEST(TotalPayoff, SingleCooperatorMatchesEnumeration) {
  for (int L : {3, 4, 5}) {
    StrategyGrid g(L);
    g.set(1, 1, Strategy::kCooperate);
    GameParams gp{5.0, 0.0};
    EXPECT_DOUBLE_EQ(total_payoff(g, 1, 1, gp), 0.0);
    for (const auto& n : neighbors(g, 1, 1)) {
      EXPECT_DOUBLE_EQ(total_payoff(g, n.row, n.col, gp), oracle::total_payoff(g, n.row, n.col, 5.0));
    }
  }
  // On a 3x3 torus each neighbour of the cooperator sits in three groups that
  // contain it (its own, the cooperator's, and the one across the wrap).
  StrategyGrid g3(3);
  g3.set(1, 1, Strategy::kCooperate);
  EXPECT_DOUBLE_EQ(total_payoff(g3, 0, 1, {5.0, 0.0}), 3.0);
  EXPECT_DOUBLE_EQ(total_payoff(g3, 0, 0, {5.0, 0.0}), 2.0);
  // From L = 4 up, only two of a neighbour's groups contain the cooperator.
  StrategyGrid g4(4);
  g4.set(1, 1, Strategy::kCooperate);
  EXPECT_DOUBLE_EQ(total_payoff(g4, 0, 1, {5.0, 0.0}), 2.0);
}

TEST(TotalPayoff, MatchesOracleOnRandomGrids) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int L = 3 + static_cast<int>(uniform_index(rng, 8));
    const double r = 1.5 + 4.5 * uniform01(rng);
    auto g = random_grid(L, rng);
    auto field = payoff_field(g, {r, 0.0});
    for (int i = 0; i < L; ++i) {
      for (int j = 0; j < L; ++j) {
        const double want = oracle::total_payoff(g, i, j, r);
        EXPECT_NEAR(total_payoff(g, i, j, {r, 0.0}), want, 1e-12);
        EXPECT_EQ(field[g.index(i, j)], total_payoff(g, i, j, {r, 0.0}));
      }
    }
  }
}

TEST(TotalPayoff, ConservationProperty) {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int L = 3 + static_cast<int>(uniform_index(rng, 8));
    const double r = 2.0 + 4.0 * uniform01(rng);
    auto g = random_grid(L, rng, uniform01(rng));
    const auto field = payoff_field(g, {r, 0.0});
    const double sum = std::accumulate(field.begin(), field.end(), 0.0);
    EXPECT_NEAR(sum, 5.0 * (r - 1.0) * static_cast<double>(g.cooperators()), 1e-9);
  }
}

TEST(TotalPayoff, GroupAccounting) {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const double r = 1.5 + 4.0 * uniform01(rng);
    int nc = 0;
    double sum = 0.0;
    for (int m = 0; m < 5; ++m) {
      if (uniform01(rng) < 0.5) ++nc;
    }
    for (int m = 0; m < 5; ++m) {
      const bool coop = m < nc;
      sum += group_payoff(coop ? Strategy::kCooperate : Strategy::kDefect, nc, {r, 0.0});
    }
    EXPECT_NEAR(sum, r * nc - nc, 1e-12);
  }
}

TEST(TotalPayoff, TorusTranslationSymmetry) {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const int L = 4 + static_cast<int>(uniform_index(rng, 5));
    auto g = random_grid(L, rng);
    const int dr = static_cast<int>(uniform_index(rng, L));
    const int dc = static_cast<int>(uniform_index(rng, L));
    StrategyGrid shifted(L);
    for (int i = 0; i < L; ++i) {
      for (int j = 0; j < L; ++j) shifted.set(i + dr, j + dc, static_cast<Strategy>(g.at(i, j)));
    }
    for (int i = 0; i < L; ++i) {
      for (int j = 0; j < L; ++j) {
        EXPECT_EQ(total_payoff(shifted, i + dr, j + dc, {4.2, 0.0}), total_payoff(g, i, j, {4.2, 0.0}));
      }
    }
  }
}

TEST(Punishment, Examples) {
  StrategyGrid g(5);
  for (const auto& n : neighbors(g, 2, 2)) g.set(n.row, n.col, Strategy::kCooperate);
  EXPECT_DOUBLE_EQ(punishment_reward(g, 2, 2, {4.0, 0.5}), -2.0);
  EXPECT_DOUBLE_EQ(punishment_reward(g, 2, 1, {4.0, 0.5}), 0.0);  // cooperator
  StrategyGrid d(5);
  EXPECT_DOUBLE_EQ(punishment_reward(d, 0, 0, {4.0, 1.1}), 0.0);
}

TEST(Punishment, BoundsOnRandomGrids) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    auto g = random_grid(6, rng);
    const double p = 1.5 * uniform01(rng);
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) {
        const double pr = punishment_reward(g, i, j, {4.0, p});
        EXPECT_LE(pr, 0.0);
        EXPECT_GE(pr, -4.0 * p);
        if (g.at(i, j)) {
          EXPECT_EQ(pr, 0.0);
        }
      }
    }
  }
}

TEST(TotalReward, Examples) {
  auto c = filled(5, Strategy::kCooperate);
  EXPECT_DOUBLE_EQ(total_reward(c, 2, 2, {4.5, 0.5}), 17.5);

  // Lone defector among cooperators.
  c.set(2, 2, Strategy::kDefect);
  const double base = oracle::total_payoff(c, 2, 2, 5.0);
  EXPECT_DOUBLE_EQ(base, 20.0);
  EXPECT_DOUBLE_EQ(total_reward(c, 2, 2, {5.0, 0.5}), base - 2.0);
}

TEST(TotalReward, ZeroPunishmentIsPayoff) {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = random_grid(7, rng);
    EXPECT_EQ(reward_field(g, {4.4, 0.0}), payoff_field(g, {4.4, 0.0}));
    auto rf = reward_field(g, {4.4, 0.7});
    for (int i = 0; i < 7; ++i) {
      for (int j = 0; j < 7; ++j) EXPECT_EQ(rf[g.index(i, j)], total_reward(g, i, j, {4.4, 0.7}));
    }
  }
}

TEST(Observe, Examples) {
  auto c = filled(4, Strategy::kCooperate);
  auto oc = observe(c, 1, 2).features();
  EXPECT_EQ(oc, (std::array<double, 4>{1, 4, 1.0, 1.0}));
  auto od = observe(filled(4, Strategy::kDefect), 3, 3).features();
  EXPECT_EQ(od, (std::array<double, 4>{0, 0, 0.0, 0.0}));

  StrategyGrid g(3);
  g.set(1, 1, Strategy::kCooperate);
  auto o = observe(g, 0, 1);
  EXPECT_EQ(o.own_strategy, 0.0);
  EXPECT_EQ(o.n_coop_neighbors, 1.0);
  EXPECT_DOUBLE_EQ(o.global_coop_freq, 1.0 / 9.0);
  EXPECT_EQ(o.local_mean_field, 0.25);
}

TEST(Observe, MeanFieldIsQuarterCount) {
  Rng rng(4);
  auto g = random_grid(9, rng);
  auto all = observe_all(g);
  for (int i = 0; i < 9; ++i) {
    for (int j = 0; j < 9; ++j) {
      auto o = observe(g, i, j);
      EXPECT_EQ(o.local_mean_field, o.n_coop_neighbors / 4.0);
      EXPECT_EQ(o.n_coop_neighbors, coop_neighbors(g, i, j));
      EXPECT_EQ(all[g.index(i, j)].features(), o.features());
    }
  }
}

TEST(ApplyActions, Basics) {
  Rng rng(6);
  auto g = random_grid(4, rng);
  EXPECT_EQ(apply_actions(g, g.cells()), g);
  std::vector<std::uint8_t> ones(16, 1);
  EXPECT_EQ(cooperation_fraction(apply_actions(g, ones)), 1.0);
  std::vector<std::uint8_t> half(16, 0);
  for (int i = 8; i < 16; ++i) half[i] = 1;
  EXPECT_EQ(cooperation_fraction(apply_actions(g, half)), 0.5);
  EXPECT_THROW(apply_actions(g, std::vector<std::uint8_t>(15, 0)), std::invalid_argument);
  EXPECT_THROW(apply_actions(g, std::vector<std::uint8_t>(16, 3)), std::invalid_argument);
}

TEST(ApplyActions, FractionEqualsMeanAction) {
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::uint8_t> a(36);
    for (auto& x : a) x = uniform01(rng) < 0.3;
    const double mean = std::accumulate(a.begin(), a.end(), 0.0) / 36.0;
    EXPECT_DOUBLE_EQ(cooperation_fraction(apply_actions(StrategyGrid(6), a)), mean);
  }
}

TEST(InitGrid, Modes) {
  EXPECT_EQ(cooperation_fraction(init_grid(4, InitMode::all_defect(), 1)), 0.0);
  EXPECT_EQ(cooperation_fraction(init_grid(4, InitMode::all_cooperate(), 1)), 1.0);
  auto h = init_grid(4, InitMode::half_and_half(), 99);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) EXPECT_EQ(h.at(i, j), i >= 2 ? 1 : 0);
  }
  EXPECT_THROW(init_grid(5, InitMode::half_and_half(), 1), std::invalid_argument);
}

TEST(InitGrid, BernoulliDeterministicAndUnbiased) {
  auto a = init_grid(200, InitMode::bernoulli(0.5), 7);
  auto b = init_grid(200, InitMode::bernoulli(0.5), 7);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, init_grid(200, InitMode::bernoulli(0.5), 8));
  // Binomial sd over 40000 cells is 0.0025; allow 5 sd.
  EXPECT_NEAR(cooperation_fraction(a), 0.5, 5 * 0.0025);
}

TEST(InitMode, ParseRoundTrip) {
  for (const char* s : {"all-d", "all-c", "half", "bernoulli:0.25"}) {
    EXPECT_EQ(InitMode::parse(s).to_string(), s);
  }
  EXPECT_EQ(InitMode::parse("bernoulli:0.3").prob, 0.3);
  EXPECT_THROW(InitMode::parse("bernoulli:1.5"), std::invalid_argument);
  EXPECT_THROW(InitMode::parse("random"), std::invalid_argument);
}
