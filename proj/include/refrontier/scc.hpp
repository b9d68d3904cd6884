#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "refrontier/matrix.hpp"

namespace refrontier {

// Directed support graph of a nonnegative matrix: edge j -> i iff m(i,j) > eps,
// i.e. trait j infects trait i.
struct SupportGraph {
  std::vector<std::vector<std::size_t>> out;

  static SupportGraph of(const Matrix& m, double eps = 0.0) {
    SupportGraph g;
    g.out.resize(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j)
        if (m(i, j) > eps) g.out[j].push_back(i);
    return g;
  }

  std::size_t size() const noexcept { return out.size(); }
};

// Strongly connected components (iterative Tarjan), listed in topological
// order of the condensation: every edge between components goes from an
// earlier component to a later one. Members of each component are sorted.
inline std::vector<IndexSet> strongly_connected_components(const SupportGraph& g) {
  constexpr std::size_t unvisited = static_cast<std::size_t>(-1);
  const std::size_t n = g.size();
  std::vector<std::size_t> index(n, unvisited), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<IndexSet> comps;
  std::size_t counter = 0;

  struct Frame {
    std::size_t v;
    std::size_t next;
  };
  std::vector<Frame> call;

  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != unvisited) continue;
    call.push_back({root, 0});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;

    while (!call.empty()) {
      Frame& f = call.back();
      const auto& succ = g.out[f.v];
      if (f.next < succ.size()) {
        const std::size_t w = succ[f.next++];
        if (index[w] == unvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      const std::size_t v = f.v;
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      if (low[v] == index[v]) {
        IndexSet comp;
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        comps.push_back(std::move(comp));
      }
    }
  }
  // Tarjan emits sinks first.
  std::reverse(comps.begin(), comps.end());
  return comps;
}

inline std::vector<IndexSet> strongly_connected_components(const Matrix& m, double eps = 0.0) {
  return strongly_connected_components(SupportGraph::of(m, eps));
}

// Component id of every vertex for a component list.
inline std::vector<std::size_t> component_labels(const std::vector<IndexSet>& comps, std::size_t n) {
  std::vector<std::size_t> label(n, 0);
  for (std::size_t c = 0; c < comps.size(); ++c)
    for (std::size_t v : comps[c]) label[v] = c;
  return label;
}

}  // namespace refrontier
