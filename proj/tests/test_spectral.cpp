#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "refrontier/spectral.hpp"

using namespace refrontier;

TEST(spectral, two_by_two) {
  EXPECT_NEAR(spectral_radius(Matrix::from_rows({{1, 2}, {3, 4}})), (5.0 + std::sqrt(33.0)) / 2.0, 1e-10);
}

TEST(spectral, cycle_uniform_strategy) {
  const Kernel ker = cycle_kernel(12);
  EXPECT_NEAR(basic_r(ker), 2.0, 1e-10);
  EXPECT_NEAR(effective_r(ker, Strategy::constant(12, 0.3)), 0.6, 1e-10);
}

TEST(spectral, one_in_four) {
  const Kernel ker = cycle_kernel(12);
  Vector eta(12, 1.0);
  for (std::size_t i = 0; i < 12; i += 4) eta[i] = 0.0;
  EXPECT_NEAR(effective_r(ker, Strategy(eta)), std::sqrt(2.0), 1e-10);
}

TEST(spectral, nilpotent_and_zero) {
  EXPECT_EQ(spectral_radius(Matrix(3, 3)), 0.0);
  EXPECT_EQ(spectral_radius(Matrix::from_rows({{0, 1, 5}, {0, 0, 2}, {0, 0, 0}})), 0.0);
  EXPECT_THROW(spectral_radius(Matrix::from_rows({{0, -1}, {1, 0}})), InputError);
}

TEST(spectral, agrees_with_dense_eigensolver) {
  oracle::Rng rng(21);
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = oracle::pick(rng, 1, 12);
    Matrix m = oracle::random_nonnegative(rng, n, n, t % 3 == 0 ? 0.7 : 0.3);
    if (t % 5 == 0) {
      // periodic: a bare weighted cycle
      m = Matrix(n, n);
      for (std::size_t i = 0; i < n; ++i) m(i, (i + 1) % n) = oracle::uniform(rng, 0.5, 2.0);
    }
    const double want = oracle::eigen_radius(m);
    EXPECT_NEAR(spectral_radius(m), want, 1e-8 * (1.0 + want)) << "case " << t;
  }
}

TEST(spectral, homogeneous_and_monotone) {
  oracle::Rng rng(22);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = oracle::pick(rng, 1, 10);
    const Kernel ker = t % 2 ? oracle::random_positive_kernel(rng, n) : oracle::random_irreducible_kernel(rng, n);
    const Vector e1 = oracle::random_strategy_values(rng, n);
    Vector e2 = e1;
    for (double& v : e2) v = std::min(1.0, v + oracle::uniform(rng, 0.0, 0.3));
    const double lambda = oracle::uniform(rng);
    Vector scaled = e1;
    for (double& v : scaled) v *= lambda;
    const double r1 = effective_r(ker, Strategy(e1));
    EXPECT_NEAR(effective_r(ker, Strategy(scaled)), lambda * r1, 1e-9 * (1.0 + r1));
    EXPECT_LE(r1, effective_r(ker, Strategy(e2)) + 1e-10);
  }
}

TEST(spectral, left_and_right_scaling_agree) {
  oracle::Rng rng(23);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = oracle::pick(rng, 1, 10);
    const Matrix a = oracle::random_nonnegative(rng, n, n);
    const Matrix b = oracle::random_nonnegative(rng, n, n);
    const double ab = spectral_radius(a * b);
    EXPECT_NEAR(ab, spectral_radius(b * a), 1e-9 * (1.0 + ab));
  }
}

TEST(spectral, perron_pair_normalization) {
  const PerronPair p = perron_pair(Matrix::from_rows({{1, 2}, {3, 4}}));
  ASSERT_TRUE(p.converged);
  double s = 0.0;
  for (double v : p.right) s += v;
  EXPECT_NEAR(s, 1.0, 1e-12);
  EXPECT_NEAR(dot(p.left, p.right), 1.0, 1e-10);
  for (double v : p.right) EXPECT_GT(v, 0.0);
}

TEST(spectral, rank_one_gradient) {
  // k = b c^T: R_e(eta) = sum_j c_j b_j mu_j eta_j, gradient c_j b_j mu_j
  const Vector b = {1.0, 2.0, 0.5}, c = {0.7, 0.3, 1.1}, mu = {0.2, 0.5, 0.3};
  Matrix k(3, 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) k(i, j) = b[i] * c[j];
  const Kernel ker(Population(mu), k);
  const auto g = r_gradient(ker, Strategy({0.4, 0.9, 0.6}));
  ASSERT_TRUE(g.has_value());
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR((*g)[j], c[j] * b[j] * mu[j], 1e-8);
}

TEST(spectral, gradient_matches_finite_differences) {
  oracle::Rng rng(24);
  for (int t = 0; t < 40; ++t) {
    const std::size_t n = oracle::pick(rng, 2, 7);
    const Kernel ker = oracle::random_positive_kernel(rng, n);
    const Vector eta = oracle::random_strategy_values(rng, n, 0.2, 0.8);
    const auto g = r_gradient(ker, Strategy(eta));
    ASSERT_TRUE(g.has_value());
    for (std::size_t j = 0; j < n; ++j) {
      Vector up = eta, dn = eta;
      up[j] += 1e-5;
      dn[j] -= 1e-5;
      const double fd = (effective_r(ker, Strategy(up)) - effective_r(ker, Strategy(dn))) / 2e-5;
      EXPECT_NEAR((*g)[j], fd, 1e-5 * (1.0 + std::abs(fd)));
    }
  }
}

TEST(spectral, gradient_absent_at_ties_and_zero) {
  const Kernel ker = from_metapopulation(Matrix::from_rows({{1, 0}, {0, 1}}), {0.5, 0.5});
  EXPECT_FALSE(r_gradient(ker, Strategy::ones(2)).has_value());
  EXPECT_FALSE(r_gradient(ker, Strategy::zeros(2)).has_value());
}
