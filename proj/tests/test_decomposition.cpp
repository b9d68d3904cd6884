#include <gtest/gtest.h>

#include <algorithm>

#include "oracles.hpp"
#include "refrontier/decomposition.hpp"

using namespace refrontier;

namespace {

// everything infected, directly or not, from the traits of `seed`
IndexSet downstream(const Kernel& ker, const IndexSet& seed) {
  const std::size_t n = ker.size();
  std::vector<bool> in(n, false);
  IndexSet todo = seed;
  for (std::size_t i : seed) in[i] = true;
  while (!todo.empty()) {
    const std::size_t j = todo.back();
    todo.pop_back();
    for (std::size_t i = 0; i < n; ++i)
      if (!in[i] && ker(i, j) > 0.0) {
        in[i] = true;
        todo.push_back(i);
      }
  }
  IndexSet out;
  for (std::size_t i = 0; i < n; ++i)
    if (in[i]) out.push_back(i);
  return out;
}

}  // namespace

TEST(decomposition, cycle_arc_is_not_invariant) {
  const Kernel ker = cycle_kernel(12);
  EXPECT_FALSE(is_invariant(ker, {0, 1, 2}));
  IndexSet all(12);
  for (std::size_t i = 0; i < 12; ++i) all[i] = i;
  EXPECT_TRUE(is_invariant(ker, all));
  EXPECT_THROW(is_invariant(ker, {12}), InputError);
}

TEST(decomposition, restriction_of_cycle_is_path) {
  const Kernel sub = restrict(cycle_kernel(12), {0, 1, 2, 3});
  ASSERT_EQ(sub.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(sub(i, j) > 0.0, i + 1 == j || j + 1 == i);
}

TEST(decomposition, classifications) {
  EXPECT_EQ(decompose(cycle_kernel(12)).classification, Classification::irreducible);
  EXPECT_EQ(decompose(Kernel(Population::counting(3), Matrix(3, 3))).classification, Classification::zero);
  // upper block radius 2, lower 3, coupled one way
  const Kernel two(Population::counting(2), Matrix::from_rows({{2, 0}, {1, 3}}));
  const AtomDecomposition d = decompose(two);
  EXPECT_EQ(d.classification, Classification::reducible_multiatomic);
  ASSERT_EQ(d.atoms.size(), 2u);
  EXPECT_EQ(d.atoms[0], IndexSet{0});
  EXPECT_NEAR(d.radii[0], 2.0, 1e-12);
  EXPECT_NEAR(d.radii[1], 3.0, 1e-12);
  EXPECT_NEAR(d.radius(), 3.0, 1e-12);
  // one atom, kernel vanishes off its square
  const Kernel quasi(Population::counting(3), Matrix::from_rows({{0, 1, 0}, {1, 0, 0}, {0, 0, 0}}));
  EXPECT_EQ(decompose(quasi).classification, Classification::quasi_irreducible);
  // one atom feeding a zero trait downstream
  const Kernel mono(Population::counting(3), Matrix::from_rows({{0, 1, 0}, {1, 0, 0}, {1, 0, 0}}));
  EXPECT_EQ(decompose(mono).classification, Classification::monatomic);
  // a zero trait upstream of the atom
  const Kernel up(Population::counting(3), Matrix::from_rows({{0, 1, 1}, {1, 0, 0}, {0, 0, 0}}));
  EXPECT_EQ(decompose(up).classification, Classification::monatomic);
}

TEST(decomposition, singleton_needs_self_loop) {
  const Kernel ker(Population::counting(3), Matrix::from_rows({{1, 0, 0}, {1, 0, 0}, {0, 1, 0}}));
  const AtomDecomposition d = decompose(ker);
  ASSERT_EQ(d.atoms.size(), 1u);
  EXPECT_EQ(d.atoms[0], IndexSet{0});
  EXPECT_EQ(d.remainder, (IndexSet{1, 2}));
}

TEST(decomposition, support_eps_drops_small_entries) {
  const Kernel ker(Population::counting(2), Matrix::from_rows({{0, 1e-12}, {1, 0}}));
  EXPECT_EQ(decompose(ker).classification, Classification::irreducible);
  EXPECT_EQ(decompose(ker, 1e-9).classification, Classification::zero);
}

TEST(decomposition, loss_is_max_over_atoms) {
  oracle::Rng rng(31);
  for (int t = 0; t < 200; ++t) {
    std::vector<std::size_t> sizes;
    std::size_t n = 0;
    const std::size_t blocks = oracle::pick(rng, 1, 4);
    for (std::size_t b = 0; b < blocks && n < 12; ++b) {
      sizes.push_back(std::min<std::size_t>(oracle::pick(rng, 1, 4), 12 - n));
      n += sizes.back();
    }
    const oracle::BlockKernel bk = oracle::random_block_kernel(rng, sizes);
    const AtomDecomposition d = decompose(bk.ker);

    // partition and invariance
    std::vector<int> seen(n, 0);
    for (const IndexSet& a : d.atoms)
      for (std::size_t i : a) ++seen[i];
    for (std::size_t i : d.remainder) ++seen[i];
    for (int s : seen) EXPECT_EQ(s, 1);
    for (const IndexSet& a : d.atoms) EXPECT_TRUE(is_invariant(bk.ker, downstream(bk.ker, a)));
    if (d.classification == Classification::irreducible) EXPECT_GT(d.radius(), 0.0);

    for (int s = 0; s < 20; ++s) {
      const Vector eta = oracle::random_strategy_values(rng, n);
      double best = 0.0;
      for (const IndexSet& a : d.atoms) {
        Vector sub;
        for (std::size_t i : a) sub.push_back(eta[i]);
        best = std::max(best, effective_r(restrict(bk.ker, a), Strategy(sub)));
      }
      const double whole = effective_r(bk.ker, Strategy(eta));
      EXPECT_NEAR(whole, best, 1e-9 * (1.0 + whole));
    }
  }
}
