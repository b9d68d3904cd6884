#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "refrontier/frontier.hpp"

using namespace refrontier;

namespace {

// k = diag(4, 2) on mu = (0.5, 0.5): two single-trait atoms with R_0 = 2 and 1
Kernel two_atoms() { return from_metapopulation(Matrix::from_rows({{2, 0}, {0, 1}}), {0.5, 0.5}); }

}  // namespace

TEST(frontier, loss_endpoints) {
  const Kernel ker = cycle_kernel(12);
  const CostModel cm = CostModel::uniform(ker.population());
  const Solution free = optimal_loss(ker, cm, 0.0);
  EXPECT_NEAR(free.value, 2.0, 1e-9);
  EXPECT_EQ(free.strategy, Strategy::ones(12));
  const Solution all = optimal_loss(ker, cm, cm.c_max());
  EXPECT_NEAR(all.value, 0.0, 1e-12);
  EXPECT_THROW(optimal_loss(ker, cm, 1.5), InputError);
  EXPECT_THROW(optimal_cost(ker, cm, 2.5), InputError);
}

TEST(frontier, two_atoms_budget) {
  const Kernel ker = two_atoms();
  const CostModel cm = CostModel::uniform(ker.population());
  const Solution s = optimal_loss(ker, cm, 0.25);
  EXPECT_NEAR(s.value, 1.0, 1e-6);
  EXPECT_NEAR(s.strategy[0], 0.5, 1e-4);
  EXPECT_NEAR(s.strategy[1], 1.0, 1e-4);
  EXPECT_NEAR(optimal_cost(ker, cm, 1.0).value, 0.25, 1e-6);
  EXPECT_NEAR(anti_optimal_cost(ker, cm, 2.0).value, 0.5, 1e-6);
}

TEST(frontier, cycle_zero_loss_cost) {
  const Kernel ker = cycle_kernel(12);
  const CostModel cm = CostModel::uniform(ker.population());
  EXPECT_NEAR(optimal_cost(ker, cm, 0.0).value, 0.5, 1e-9);
  const Frontier f = pareto_frontier(ker, cm, {0.0, 2.0});
  EXPECT_NEAR(f.c_star, 0.5, 1e-12);
  EXPECT_TRUE(f.c_star_exact);
}

TEST(frontier, rank_one_matches_knapsack) {
  oracle::Rng rng(61);
  for (int t = 0; t < 15; ++t) {
    const std::size_t n = oracle::pick(rng, 2, 6);
    const Vector f = oracle::random_strategy_values(rng, n, 0.2, 2), g = oracle::random_strategy_values(rng, n, 0.2, 2);
    Matrix k(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) k(i, j) = f[i] * g[j];
    const Kernel ker(Population(oracle::random_mu(rng, n)), k);
    const CostModel cm = CostModel::affine(ker.population(), oracle::random_strategy_values(rng, n, 0.2, 3));
    Vector w(n);
    for (std::size_t j = 0; j < n; ++j) w[j] = f[j] * g[j] * ker.mu(j);
    const double r0 = basic_r(ker);
    for (double frac : {0.1, 0.4, 0.8}) {
      const double want = oracle::rank_one_optimal_cost(w, cm.masses(), frac * r0);
      EXPECT_NEAR(optimal_cost(ker, cm, frac * r0).value, want, 1e-6 * (1.0 + cm.c_max())) << "case " << t;
    }
  }
}

TEST(frontier, irreducible_endpoints) {
  oracle::Rng rng(62);
  for (int t = 0; t < 10; ++t) {
    const std::size_t n = oracle::pick(rng, 2, 6);
    const Kernel ker = oracle::random_positive_kernel(rng, n);
    const CostModel cm = CostModel::uniform(ker.population());
    const double r0 = basic_r(ker);
    const Solution at_zero_cost = optimal_loss(ker, cm, 0.0);
    EXPECT_EQ(at_zero_cost.strategy, Strategy::ones(n));
    const Solution at_zero_loss = optimal_cost(ker, cm, 0.0);
    EXPECT_NEAR(at_zero_loss.value, cm.c_max(), 1e-9);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(at_zero_loss.strategy[i], 0.0, 1e-9);
    EXPECT_NEAR(anti_optimal_cost(ker, cm, r0).value, 0.0, 1e-9);
    const Frontier f = pareto_frontier(ker, cm, {0.0, r0});
    EXPECT_NEAR(f.c_star, cm.c_max(), 1e-9);
  }
}

TEST(frontier, monatomic_anti_endpoint) {
  // atom {0, 1}; trait 2 infects the atom but is never infected
  const Kernel ker(Population::counting(3), Matrix::from_rows({{0, 1, 1}, {1, 0, 0}, {0, 0, 0}}));
  const CostModel cm = CostModel::uniform(ker.population());
  const Solution s = anti_optimal_cost(ker, cm, basic_r(ker));
  EXPECT_NEAR(s.value, cm.evaluate(Strategy({1, 1, 0})), 1e-9);
}

TEST(frontier, zero_kernel_collapses) {
  const Kernel ker(Population({0.5, 0.5}), Matrix(2, 2));
  const CostModel cm = CostModel::uniform(ker.population());
  const Frontier f = pareto_frontier(ker, cm, default_grid(0.0));
  ASSERT_EQ(f.points.size(), 1u);
  EXPECT_EQ(f.points[0].cost, 0.0);
  EXPECT_EQ(f.points[0].loss, 0.0);
  const Frontier a = anti_pareto_frontier(ker, cm, default_grid(0.0));
  ASSERT_EQ(a.points.size(), 1u);
}

TEST(frontier, values_are_monotone) {
  oracle::Rng rng(63);
  for (int t = 0; t < 4; ++t) {
    const std::size_t n = oracle::pick(rng, 2, 5);
    const Kernel ker = oracle::random_irreducible_kernel(rng, n, 0.4);
    const CostModel cm = CostModel::uniform(ker.population());
    const std::vector<double> grid = default_grid(basic_r(ker), 21);
    for (const Frontier& f : {pareto_frontier(ker, cm, grid), anti_pareto_frontier(ker, cm, grid)}) {
      // points are cost ascending, so loss must not increase
      for (std::size_t k = 1; k < f.points.size(); ++k) {
        EXPECT_GE(f.points[k].cost, f.points[k - 1].cost - 1e-9);
        EXPECT_LE(f.points[k].loss, f.points[k - 1].loss + 1e-9);
      }
    }
  }
}

TEST(frontier, feasible_region_sandwich) {
  oracle::Rng rng(64);
  const Kernel ker = oracle::random_irreducible_kernel(rng, 3, 0.5);
  const CostModel cm = CostModel::affine(ker.population(), {1.0, 2.0, 0.5});
  for (int t = 0; t < 1000; ++t) {
    const Strategy eta(oracle::random_strategy_values(rng, 3));
    const double c = cm.evaluate(eta), r = effective_r(ker, eta);
    EXPECT_LE(optimal_loss(ker, cm, c).value - 1e-6, r);
    EXPECT_LE(r, anti_optimal_loss(ker, cm, c).value + 1e-6);
  }
}

TEST(frontier, cost_and_loss_invert) {
  oracle::Rng rng(65);
  const Kernel ker = oracle::random_irreducible_kernel(rng, 4, 0.4);
  const CostModel cm = CostModel::uniform(ker.population());
  const double c_star = optimal_cost(ker, cm, 0.0).value;
  const double r0 = basic_r(ker);
  for (int k = 0; k <= 10; ++k) {
    const double c = c_star * k / 10.0;
    EXPECT_NEAR(optimal_cost(ker, cm, optimal_loss(ker, cm, c).value).value, c, 1e-4);
    const double l = r0 * k / 10.0;
    EXPECT_NEAR(anti_optimal_loss(ker, cm, anti_optimal_cost(ker, cm, l).value).value, l, 1e-4);
  }
}

TEST(frontier, optimal_ray) {
  const Kernel ker(Population::probability(3), Matrix(3, 3, 1.0));
  const CostModel cm = CostModel::uniform(ker.population());
  const auto ray = detect_optimal_ray(ker, cm, Strategy::constant(3, 0.5), true);
  ASSERT_TRUE(ray.has_value());
  EXPECT_DOUBLE_EQ(ray->lambda_max, 2.0);
  EXPECT_NEAR(ray->points.back().loss, 1.0, 1e-10);
  EXPECT_EQ(ray->points.front().loss, 0.0);
  EXPECT_EQ(ray->c_star, cm.c_max());

  const auto flat = detect_optimal_ray(ker, cm, Strategy::zeros(3), true);
  ASSERT_TRUE(flat.has_value());
  EXPECT_EQ(flat->points.size(), 1u);
  EXPECT_THROW(detect_optimal_ray(ker, cm, Strategy({0.5, 1.0, 0.5}), true), PreconditionError);
  EXPECT_THROW(detect_optimal_ray(ker, cm, Strategy::constant(3, 0.5), false), PreconditionError);
}

TEST(frontier, combination_of_two_atoms) {
  const Kernel ker = two_atoms();
  const CostModel cm = CostModel::uniform(ker.population());
  const std::vector<double> grid = {0.0, 0.5, 1.0, 1.5, 2.0};
  const auto [pareto, anti] = combine_atom_frontiers(atom_frontiers(ker, cm, grid), cm, decompose(ker).remainder);
  const auto cost_at = [](const Frontier& f, double l) {
    for (const FrontierPoint& p : f.points)
      if (std::abs(p.level - l) < 1e-12) return p.cost;
    return -1.0;
  };
  EXPECT_NEAR(cost_at(pareto, 1.0), 0.25, 1e-6);
  EXPECT_NEAR(cost_at(anti, 2.0), 0.5, 1e-6);
  EXPECT_NEAR(cost_at(pareto, 0.0), 0.5 + 0.5, 1e-6);
}

TEST(frontier, anti_jump_on_two_atoms) {
  const Kernel ker = from_metapopulation(Matrix::from_rows({{2, 0}, {0, 1}}), {0.8, 0.2});
  const CostModel cm = CostModel::uniform(ker.population());
  const Frontier f = anti_pareto_frontier(ker, cm, default_grid(2.0));
  EXPECT_FALSE(f.jumps.empty());
}

TEST(frontier, seeded_runs_repeat) {
  oracle::Rng rng(66);
  const Kernel ker = oracle::random_irreducible_kernel(rng, 5, 0.4);
  const CostModel cm = CostModel::uniform(ker.population());
  SolverOptions opts;
  opts.seed = 7;
  const std::vector<double> grid = default_grid(basic_r(ker), 11);
  const Frontier a = pareto_frontier(ker, cm, grid, opts), b = pareto_frontier(ker, cm, grid, opts);
  ASSERT_EQ(a.points.size(), b.points.size());
  for (std::size_t k = 0; k < a.points.size(); ++k) {
    EXPECT_EQ(a.points[k].cost, b.points[k].cost);
    EXPECT_EQ(a.points[k].strategy, b.points[k].strategy);
  }
}

TEST(frontier, custom_cost_is_rejected) {
  const Kernel ker = two_atoms();
  const CostModel cm = CostModel::custom(ker.population(), [](const Strategy& s) { return 2.0 - s[0] - s[1]; });
  EXPECT_THROW(optimal_cost(ker, cm, 1.0), PreconditionError);
}
