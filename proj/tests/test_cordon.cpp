#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "refrontier/cordon.hpp"
#include "refrontier/frontier.hpp"

using namespace refrontier;

TEST(cordon, one_in_four_on_cycle) {
  const Kernel ker = from_metapopulation(cycle_adjacency(12), Vector(12, 1.0));
  const CostModel cm = CostModel::uniform(ker.population());
  Vector e(12, 1.0);
  for (std::size_t i = 0; i < 12; i += 4) e[i] = 0.0;
  const Strategy eta(e);
  const CordonReport rep = cordon_report(ker, cm, eta);
  EXPECT_TRUE(rep.disconnecting);
  ASSERT_EQ(rep.components.size(), 3u);
  for (const IndexSet& c : rep.components) EXPECT_EQ(c.size(), 3u);
  ASSERT_TRUE(rep.improvement.has_value());
  EXPECT_EQ(cm.evaluate(eta), 3.0);
  EXPECT_EQ(cm.evaluate(*rep.improvement), 9.0);
  EXPECT_NEAR(effective_r(ker, *rep.improvement), std::sqrt(2.0), 1e-10);
  EXPECT_NEAR(effective_r(ker, eta), std::sqrt(2.0), 1e-10);
}

TEST(cordon, two_atoms_drops_the_weaker) {
  const Kernel ker = from_metapopulation(Matrix::from_rows({{2, 0}, {0, 1}}), {0.5, 0.5});
  const CostModel cm = CostModel::uniform(ker.population());
  const CordonReport rep = cordon_report(ker, cm, Strategy::ones(2));
  EXPECT_TRUE(rep.disconnecting);
  ASSERT_TRUE(rep.improvement.has_value());
  EXPECT_EQ(*rep.improvement, Strategy({1.0, 0.0}));
}

TEST(cordon, chain_keeps_the_strongest_link) {
  // 0 -> 1 -> 2 with self-infection 3, 1, 2
  const Kernel ker(Population::counting(3), Matrix::from_rows({{3, 0, 0}, {1, 1, 0}, {0, 1, 2}}));
  const CostModel cm = CostModel::uniform(ker.population());
  const Strategy better = improve_cordon(ker, cm, Strategy::ones(3));
  EXPECT_EQ(better, Strategy({1.0, 0.0, 0.0}));
  EXPECT_NEAR(effective_r(ker, better), 3.0, 1e-12);
}

TEST(cordon, positive_kernels_never_disconnect) {
  oracle::Rng rng(71);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = oracle::pick(rng, 1, 8);
    const Kernel ker = oracle::random_positive_kernel(rng, n);
    Vector e = oracle::random_strategy_values(rng, n, 0.1, 1.0);
    e[oracle::pick(rng, 0, n - 1)] = 0.0;
    if (n == 1) continue;
    EXPECT_FALSE(is_disconnecting(ker, Strategy(e)).disconnecting);
  }
}

TEST(cordon, non_disconnecting_input_is_rejected) {
  const Kernel ker = cycle_kernel(12);
  const CostModel cm = CostModel::uniform(ker.population());
  EXPECT_THROW(improve_cordon(ker, cm, Strategy::ones(12)), PreconditionError);
  EXPECT_FALSE(cordon_report(ker, cm, Strategy::zeros(12)).disconnecting);
}

TEST(cordon, improvement_keeps_loss_and_costs_more) {
  oracle::Rng rng(72);
  int checked = 0;
  for (int t = 0; t < 200; ++t) {
    const oracle::BlockKernel bk = oracle::random_block_kernel(rng, {oracle::pick(rng, 1, 3), oracle::pick(rng, 1, 3), oracle::pick(rng, 1, 3)});
    const std::size_t n = bk.ker.size();
    const CostModel cm = CostModel::affine(bk.ker.population(), oracle::random_strategy_values(rng, n, 0.1, 3));
    const Strategy eta(oracle::random_strategy_values(rng, n, 0.1, 1.0));
    const CordonReport rep = cordon_report(bk.ker, cm, eta);
    if (!rep.improvement) continue;
    ++checked;
    const Strategy& better = *rep.improvement;
    const double r = effective_r(bk.ker, eta);
    EXPECT_NEAR(effective_r(bk.ker, better), r, 1e-9 * (1.0 + r));
    EXPECT_GT(cm.evaluate(better), cm.evaluate(eta));

    // scaling what the improvement drops leaves the loss unchanged
    for (double theta : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      Vector mid = eta.values();
      for (std::size_t i = 0; i < n; ++i)
        if (better[i] == 0.0) mid[i] *= theta;
      EXPECT_NEAR(effective_r(bk.ker, Strategy(mid)), r, 1e-9 * (1.0 + r));
    }
  }
  EXPECT_GT(checked, 150);
}

TEST(cordon, anti_optima_are_connected) {
  oracle::Rng rng(73);
  for (int t = 0; t < 4; ++t) {
    const oracle::BlockKernel bk = oracle::random_block_kernel(rng, {2, 2});
    const CostModel cm = CostModel::uniform(bk.ker.population());
    const double r0 = basic_r(bk.ker);
    for (double frac : {0.3, 0.6, 0.9}) {
      const Solution s = anti_optimal_cost(bk.ker, cm, frac * r0);
      EXPECT_FALSE(is_disconnecting(bk.ker, s.strategy).disconnecting);
    }
  }
}
