#pragma once

#include <algorithm>
#include <cstddef>
#include <string_view>
#include <vector>

#include "refrontier/error.hpp"
#include "refrontier/kernel.hpp"
#include "refrontier/matrix.hpp"
#include "refrontier/scc.hpp"
#include "refrontier/spectral.hpp"

namespace refrontier {

enum class Classification { zero, irreducible, quasi_irreducible, monatomic, reducible_multiatomic };

inline std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::zero: return "zero";
    case Classification::irreducible: return "irreducible";
    case Classification::quasi_irreducible: return "quasi-irreducible";
    case Classification::monatomic: return "monatomic";
    case Classification::reducible_multiatomic: return "reducible-multiatomic";
  }
  return "unknown";
}

struct AtomDecomposition {
  std::vector<IndexSet> atoms;  // topological order, upstream first
  IndexSet remainder;
  Vector radii;
  Classification classification = Classification::zero;

  double radius() const noexcept {
    double r = 0.0;
    for (double v : radii) r = std::max(r, v);
    return r;
  }
};

namespace detail {

inline void check_indices(const IndexSet& set, std::size_t n) {
  std::vector<bool> seen(n, false);
  for (std::size_t i : set) {
    if (i >= n) throw InputError("trait index out of range");
    if (seen[i]) throw InputError("duplicate trait index");
    seen[i] = true;
  }
}

// k mu with entries <= eps dropped.
inline Matrix thresholded(const Kernel& ker, double eps) {
  Matrix m = weighted_matrix(ker);
  if (eps > 0.0)
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j)
        if (m(i, j) <= eps) m(i, j) = 0.0;
  return m;
}

}  // namespace detail

// k(A^c, A) = 0: no trait of A infects a trait outside A.
inline bool is_invariant(const Kernel& ker, const IndexSet& a) {
  const std::size_t n = ker.size();
  detail::check_indices(a, n);
  std::vector<bool> in(n, false);
  for (std::size_t i : a) in[i] = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (in[i]) continue;
    for (std::size_t j : a)
      if (ker(i, j) * ker.mu(i) * ker.mu(j) != 0.0) return false;
  }
  return true;
}

// Kernel restricted to the traits of `a`, in the given order.
inline Kernel restrict(const Kernel& ker, const IndexSet& a) {
  if (a.empty()) throw InputError("cannot restrict to an empty set");
  detail::check_indices(a, ker.size());
  Vector mu(a.size());
  for (std::size_t p = 0; p < a.size(); ++p) mu[p] = ker.mu(a[p]);
  return Kernel(Population(std::move(mu)), ker.matrix().principal(a));
}

// Non-zero atoms are the strongly connected components of the support of
// k mu (edge j -> i iff k(i,j) mu(j) > eps) with positive radius.
inline AtomDecomposition decompose(const Kernel& ker, double eps = 0.0, const SpectralOptions& opts = {}) {
  const std::size_t n = ker.size();
  const Matrix m = detail::thresholded(ker, eps);
  const double tol = opts.rel_tol * (1.0 + m.inf_norm());
  AtomDecomposition dec;
  std::vector<bool> in_atom(n, false);
  for (const IndexSet& c : strongly_connected_components(m)) {
    double r;
    if (c.size() == 1) {
      r = m(c[0], c[0]);
    } else {
      r = detail::irreducible_radius(m.principal(c), tol, opts);
    }
    if (r <= 0.0) continue;
    dec.atoms.push_back(c);
    dec.radii.push_back(r);
    for (std::size_t v : c) in_atom[v] = true;
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!in_atom[i]) dec.remainder.push_back(i);

  if (dec.atoms.empty()) {
    dec.classification = Classification::zero;
  } else if (dec.atoms.size() > 1) {
    dec.classification = Classification::reducible_multiatomic;
  } else if (dec.atoms.front().size() == n) {
    dec.classification = Classification::irreducible;
  } else {
    std::vector<bool> in(n, false);
    for (std::size_t v : dec.atoms.front()) in[v] = true;
    bool outside_zero = true;
    for (std::size_t i = 0; i < n && outside_zero; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (!(in[i] && in[j]) && m(i, j) > 0.0) {
          outside_zero = false;
          break;
        }
    dec.classification = outside_zero ? Classification::quasi_irreducible : Classification::monatomic;
  }
  return dec;
}

}  // namespace refrontier
