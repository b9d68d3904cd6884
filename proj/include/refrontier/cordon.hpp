#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "refrontier/cost.hpp"
#include "refrontier/decomposition.hpp"
#include "refrontier/error.hpp"
#include "refrontier/kernel.hpp"
#include "refrontier/scc.hpp"
#include "refrontier/spectral.hpp"

namespace refrontier {

struct CordonReport {
  bool disconnecting = false;
  // SCCs of k restricted to {eta > 0}, topological order, full-kernel indices.
  std::vector<IndexSet> components;
  std::optional<Strategy> improvement;
};

namespace detail {

inline IndexSet positive_part(const Strategy& eta) {
  IndexSet p;
  for (std::size_t i = 0; i < eta.size(); ++i)
    if (eta[i] > 0.0) p.push_back(i);
  return p;
}

}  // namespace detail

// eta != 0 and the kernel restricted to {eta > 0} is not irreducible.
inline CordonReport is_disconnecting(const Kernel& ker, const Strategy& eta, double eps = 0.0) {
  detail::require_size(eta.size(), ker.size(), "is_disconnecting");
  CordonReport rep;
  const IndexSet pos = detail::positive_part(eta);
  if (pos.empty()) return rep;
  const Kernel sub = restrict(ker, pos);
  const Matrix m = detail::thresholded(sub, eps);
  for (const IndexSet& c : strongly_connected_components(m)) {
    IndexSet g;
    for (std::size_t q : c) g.push_back(pos[q]);
    rep.components.push_back(std::move(g));
  }
  rep.disconnecting = decompose(sub, eps).classification != Classification::irreducible;
  return rep;
}

// Equal-loss strategy with more vaccination: keep eta on one component of
// maximal effective radius (the one with the smallest kept cost mass, then
// the lowest position) and vaccinate every other trait.
inline Strategy improve_cordon(const Kernel& ker, const CostModel& cm, const Strategy& eta, double eps = 0.0,
                               const SpectralOptions& opts = {}) {
  detail::require_size(cm.size(), ker.size(), "improve_cordon");
  const CordonReport rep = is_disconnecting(ker, eta, eps);
  if (!rep.disconnecting) throw PreconditionError("strategy is not disconnecting");
  if (basic_r(ker, opts) <= 0.0) throw PreconditionError("kernel has zero reproduction number");
  const Matrix m = operator_matrix(ker, eta);
  Vector radii;
  double top = 0.0;
  for (const IndexSet& c : rep.components) {
    const double r = c.size() == 1 ? m(c[0], c[0]) : spectral_radius(m.principal(c), opts);
    radii.push_back(r);
    top = std::max(top, r);
  }
  std::size_t keep = rep.components.size();
  double keep_mass = 0.0;
  for (std::size_t k = 0; k < rep.components.size(); ++k) {
    if (radii[k] < top * (1.0 - 1e-12)) continue;
    double mass = 0.0;
    for (std::size_t v : rep.components[k]) mass += eta[v] * cm.masses()[v];
    if (keep == rep.components.size() || mass < keep_mass ||
        (mass == keep_mass && rep.components[k].front() < rep.components[keep].front())) {
      keep = k;
      keep_mass = mass;
    }
  }
  Vector out(ker.size(), 0.0);
  for (std::size_t v : rep.components[keep]) out[v] = eta[v];
  return Strategy(std::move(out));
}

// Detection plus the improvement when the strategy has positive loss.
inline CordonReport cordon_report(const Kernel& ker, const CostModel& cm, const Strategy& eta, double eps = 0.0,
                                  const SpectralOptions& opts = {}) {
  CordonReport rep = is_disconnecting(ker, eta, eps);
  if (rep.disconnecting && effective_r(ker, eta, opts) > 0.0) rep.improvement = improve_cordon(ker, cm, eta, eps, opts);
  return rep;
}

}  // namespace refrontier
