#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "refrontier/kernel.hpp"
#include "refrontier/spectral.hpp"

using namespace refrontier;

TEST(kernel, cycle_metapop_gives_scaled_adjacency) {
  const Kernel ker = cycle_kernel(12);
  const Matrix a = cycle_adjacency(12);
  for (std::size_t i = 0; i < 12; ++i)
    for (std::size_t j = 0; j < 12; ++j) EXPECT_DOUBLE_EQ(ker(i, j), 12.0 * a(i, j));
  EXPECT_DOUBLE_EQ(ker.population().total_mass(), 1.0);
}

TEST(kernel, metapop_divides_by_column_mass) {
  const Kernel ker = from_metapopulation(Matrix::from_rows({{0, 2}, {3, 0}}), {0.5, 0.25});
  EXPECT_EQ(ker(0, 0), 0.0);
  EXPECT_EQ(ker(0, 1), 8.0);
  EXPECT_EQ(ker(1, 0), 6.0);
  EXPECT_EQ(ker(1, 1), 0.0);
}

TEST(kernel, rates_divide_by_recovery) {
  const Kernel ker = from_rates(Matrix::from_rows({{2, 4}, {6, 8}}), {2, 4});
  EXPECT_EQ(ker(0, 0), 1.0);
  EXPECT_EQ(ker(0, 1), 1.0);
  EXPECT_EQ(ker(1, 0), 3.0);
  EXPECT_EQ(ker(1, 1), 2.0);
}

TEST(kernel, double_norm_of_counting_cycle) {
  const Kernel ker(Population::counting(12), cycle_adjacency(12));
  EXPECT_NEAR(double_norm(ker, 2.0), std::sqrt(24.0), 1e-12);
  EXPECT_THROW(double_norm(ker, 1.0), PreconditionError);
}

TEST(kernel, rejects_bad_inputs) {
  EXPECT_THROW(Population({1.0, 0.0}), InputError);
  EXPECT_THROW(Population({1.0, -2.0}), InputError);
  EXPECT_THROW(Population(Vector{}), InputError);
  EXPECT_THROW(Strategy({0.5, 1.5}), InputError);
  EXPECT_THROW(Kernel(Population::counting(2), Matrix::from_rows({{0, -1}, {0, 0}})), InputError);
  EXPECT_THROW(Kernel(Population::counting(3), Matrix(2, 2)), InputError);
  EXPECT_THROW(from_rates(Matrix(2, 2), {1.0, 0.0}), InputError);
}

TEST(kernel, scaling_composes_entrywise) {
  oracle::Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = oracle::pick(rng, 1, 8);
    const Kernel ker = oracle::random_positive_kernel(rng, n);
    const Vector f = oracle::random_strategy_values(rng, n, 0, 2), g = oracle::random_strategy_values(rng, n, 0, 2);
    const Vector f2 = oracle::random_strategy_values(rng, n, 0, 2), g2 = oracle::random_strategy_values(rng, n, 0, 2);
    Vector ff(n), gg(n);
    for (std::size_t i = 0; i < n; ++i) {
      ff[i] = f[i] * f2[i];
      gg[i] = g[i] * g2[i];
    }
    const Kernel a = scale(f2, scale(f, ker, g), g2);
    const Kernel b = scale(ff, ker, gg);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) EXPECT_NEAR(a(i, j), b(i, j), 1e-15 * (1.0 + b(i, j)));
  }
}

TEST(kernel, radius_bounded_by_double_norm) {
  oracle::Rng rng(12);
  for (int t = 0; t < 120; ++t) {
    const std::size_t n = oracle::pick(rng, 1, 8);
    const Kernel ker(Population(oracle::random_mu(rng, n)), oracle::random_nonnegative(rng, n, n));
    const double p = oracle::uniform(rng, 1.1, 6.0);
    EXPECT_LE(basic_r(ker), double_norm(ker, p) * (1.0 + 1e-12) + 1e-15);
  }
}

TEST(kernel, metapop_round_trip) {
  oracle::Rng rng(13);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = oracle::pick(rng, 1, 8);
    const Matrix big = oracle::random_nonnegative(rng, n, n);
    const Vector mu = oracle::random_mu(rng, n);
    const Kernel ker = from_metapopulation(big, mu);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) EXPECT_NEAR(ker(i, j) * mu[j], big(i, j), 1e-15 * big(i, j));
  }
  // dyadic inputs round-trip exactly
  const Matrix big = Matrix::from_rows({{0.5, 3}, {1.25, 0}});
  const Kernel ker = from_metapopulation(big, {0.25, 0.5});
  EXPECT_EQ(ker(0, 1) * 0.5, 3.0);
  EXPECT_EQ(ker(1, 0) * 0.25, 1.25);
}

TEST(kernel, midpoint_discretization) {
  const Kernel ker = discretize_unit_square([](double x, double y) { return x + y; }, 4);
  EXPECT_DOUBLE_EQ(ker.mu(0), 0.25);
  EXPECT_DOUBLE_EQ(ker(0, 3), 0.125 + 0.875);
}
