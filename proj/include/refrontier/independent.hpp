#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "refrontier/cost.hpp"
#include "refrontier/decomposition.hpp"
#include "refrontier/error.hpp"
#include "refrontier/kernel.hpp"

namespace refrontier {

struct IndependentSetResult {
  IndexSet set;
  double weight = 0.0;  // sum of cost masses over the set
  double c_star = 0.0;  // c_max - weight = C(1_set)
};

inline bool has_symmetric_support(const Kernel& ker, double eps = 0.0) {
  const Matrix m = detail::thresholded(ker, eps);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j)
      if ((m(i, j) > 0.0) != (m(j, i) > 0.0)) return false;
  return true;
}

// k = 0 on A x A, diagonal included.
inline bool is_independent(const Kernel& ker, const IndexSet& a) {
  detail::check_indices(a, ker.size());
  for (std::size_t i : a)
    for (std::size_t j : a)
      if (ker(i, j) != 0.0) return false;
  return true;
}

namespace detail {

class MwisSearch {
 public:
  MwisSearch(std::vector<std::vector<bool>> adj, Vector w) : adj_(std::move(adj)), w_(std::move(w)) {
    double total = 0.0;
    for (double v : w_) total += v;
    tol_ = 1e-12 * (1.0 + total);
  }

  IndexSet run(const IndexSet& vertices) {
    best_ = greedy(vertices);
    best_w_ = weight_of(best_);
    from_greedy_ = true;
    IndexSet cur;
    search(vertices, cur, 0.0);
    std::sort(best_.begin(), best_.end());
    return best_;
  }

 private:
  double weight_of(const IndexSet& s) const {
    double t = 0.0;
    for (std::size_t v : s) t += w_[v];
    return t;
  }

  // Repeatedly take the vertex with the best weight per closed-neighbourhood
  // size in what is left.
  IndexSet greedy(IndexSet left) const {
    IndexSet out;
    while (!left.empty()) {
      std::size_t pick = 0;
      double best = -1.0;
      for (std::size_t p = 0; p < left.size(); ++p) {
        std::size_t deg = 0;
        for (std::size_t q : left)
          if (adj_[left[p]][q]) ++deg;
        const double score = w_[left[p]] / static_cast<double>(deg + 1);
        if (score > best) {
          best = score;
          pick = p;
        }
      }
      const std::size_t v = left[pick];
      out.push_back(v);
      IndexSet next;
      for (std::size_t q : left)
        if (q != v && !adj_[v][q]) next.push_back(q);
      left = std::move(next);
    }
    return out;
  }

  // Greedy partition into cliques; each clique contributes its heaviest vertex.
  double clique_cover_bound(const IndexSet& cand) const {
    IndexSet order = cand;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return w_[x] > w_[y]; });
    std::vector<IndexSet> cliques;
    double bound = 0.0;
    for (std::size_t v : order) {
      bool placed = false;
      for (IndexSet& c : cliques) {
        bool ok = true;
        for (std::size_t u : c)
          if (!adj_[v][u]) {
            ok = false;
            break;
          }
        if (ok) {
          c.push_back(v);
          placed = true;
          break;
        }
      }
      if (!placed) {
        cliques.push_back({v});
        bound += w_[v];
      }
    }
    return bound;
  }

  void search(const IndexSet& cand, IndexSet& cur, double cur_w) {
    if (cand.empty()) {
      const bool better = from_greedy_ ? cur_w >= best_w_ - tol_ : cur_w > best_w_ + tol_;
      if (better) {
        best_ = cur;
        best_w_ = cur_w;
        from_greedy_ = false;
      }
      return;
    }
    const double bound = cur_w + clique_cover_bound(cand);
    if (from_greedy_ ? bound < best_w_ - tol_ : bound <= best_w_ + tol_) return;

    const std::size_t v = cand.front();
    IndexSet with;
    for (std::size_t q : cand)
      if (q != v && !adj_[v][q]) with.push_back(q);
    cur.push_back(v);
    search(with, cur, cur_w + w_[v]);
    cur.pop_back();

    IndexSet without(cand.begin() + 1, cand.end());
    search(without, cur, cur_w);
  }

  std::vector<std::vector<bool>> adj_;
  Vector w_;
  double tol_ = 0.0;
  IndexSet best_;
  double best_w_ = 0.0;
  bool from_greedy_ = true;
};

}  // namespace detail

// Exact maximum-weight independent set by branch and bound, weighting trait i
// by its cost mass. Traits with a self-loop are never independent.
inline IndependentSetResult max_weight_independent_set(const Kernel& ker, const CostModel& cm, double eps = 0.0) {
  if (!cm.is_affine()) throw PreconditionError("independent-set cost needs an affine cost");
  detail::require_size(cm.size(), ker.size(), "max_weight_independent_set");
  if (!has_symmetric_support(ker, eps)) throw PreconditionError("kernel support is not symmetric");
  const std::size_t n = ker.size();
  const Matrix m = detail::thresholded(ker, eps);
  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
  IndexSet vertices;
  for (std::size_t i = 0; i < n; ++i) {
    if (m(i, i) > 0.0) continue;
    vertices.push_back(i);
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && m(i, j) > 0.0) adj[i][j] = adj[j][i] = true;
  }
  detail::MwisSearch search(std::move(adj), cm.masses());
  IndependentSetResult res;
  res.set = search.run(vertices);
  long double w = 0.0L;
  for (std::size_t v : res.set) w += cm.masses()[v];
  res.weight = static_cast<double>(w);
  res.c_star = cm.evaluate(Strategy::indicator(n, res.set));
  return res;
}

}  // namespace refrontier
