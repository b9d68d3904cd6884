#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "refrontier/cost.hpp"
#include "refrontier/decomposition.hpp"
#include "refrontier/detail/local_solver.hpp"
#include "refrontier/error.hpp"
#include "refrontier/independent.hpp"
#include "refrontier/kernel.hpp"
#include "refrontier/spectral.hpp"

namespace refrontier {

struct Solution {
  double value = 0.0;  // loss or cost, depending on the problem
  Strategy strategy{Vector{}};
};

enum class FrontierKind { pareto, anti_pareto };

struct FrontierPoint {
  double cost = 0.0;
  double loss = 0.0;
  Strategy strategy{Vector{}};
  double level = 0.0;  // the loss level the point was solved for
};

struct Frontier {
  FrontierKind kind = FrontierKind::pareto;
  std::vector<FrontierPoint> points;  // cost ascending
  // Pareto: minimal cost of a zero-loss strategy. Exact when the support is
  // symmetric; otherwise a solver value with c_star_bound as upper bound.
  double c_star = 0.0;
  bool c_star_exact = true;
  double c_star_bound = 0.0;
  // Anti-Pareto: maximal cost of a strategy keeping the loss at R_0.
  double c_star_upper = 0.0;
  // Index k marks a discontinuity between points[k] and points[k+1].
  std::vector<std::size_t> jumps;
};

namespace detail {

struct ZeroLoss {
  double cost = 0.0;  // intrinsic cost on the problem it was computed for
  Vector eta;
  bool exact = true;
  double bound = 0.0;
};

inline bool induced_acyclic(const Problem& p, const std::vector<bool>& in) {
  IndexSet idx;
  for (std::size_t i = 0; i < p.n; ++i)
    if (in[i]) idx.push_back(i);
  if (idx.empty()) return true;
  const Matrix sub = p.kmu.principal(idx);
  for (std::size_t a = 0; a < idx.size(); ++a)
    if (sub(a, a) > 0.0) return false;
  return strongly_connected_components(sub).size() == idx.size();
}

// Zero-loss strategy of minimal cost on a problem: an exact maximum-weight
// independent set when the support is symmetric, otherwise a greedy induced
// acyclic set seeded with every trait outside the atoms.
inline ZeroLoss zero_loss(const Problem& p, const AtomDecomposition& dec, bool symmetric) {
  ZeroLoss z;
  if (dec.atoms.empty()) {
    z.eta.assign(p.n, 1.0);
    return z;
  }
  for (const IndexSet& atom : dec.atoms)
    for (std::size_t v : atom) z.bound += p.a[v];
  std::vector<bool> in(p.n, false);
  if (symmetric) {
    std::vector<std::vector<bool>> adj(p.n, std::vector<bool>(p.n, false));
    IndexSet vertices;
    for (std::size_t i = 0; i < p.n; ++i) {
      if (p.kmu(i, i) > 0.0) continue;
      vertices.push_back(i);
      for (std::size_t j = 0; j < p.n; ++j)
        if (i != j && p.kmu(i, j) > 0.0) adj[i][j] = adj[j][i] = true;
    }
    MwisSearch search(std::move(adj), p.a);
    for (std::size_t v : search.run(vertices)) in[v] = true;
  } else {
    z.exact = false;
    for (std::size_t v : dec.remainder) in[v] = true;
    IndexSet order;
    for (const IndexSet& atom : dec.atoms) order.insert(order.end(), atom.begin(), atom.end());
    std::sort(order.begin(), order.end());
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return p.a[x] > p.a[y]; });
    for (std::size_t v : order) {
      in[v] = true;
      if (!induced_acyclic(p, in)) in[v] = false;
    }
  }
  z.eta.assign(p.n, 0.0);
  for (std::size_t i = 0; i < p.n; ++i)
    if (in[i]) z.eta[i] = 1.0;
  z.cost = p.amass - p.value(z.eta);
  if (z.exact) z.bound = std::max(z.bound, z.cost);
  return z;
}

// Everything the four value functions need about one (kernel, cost) pair.
struct Context {
  const Kernel* ker = nullptr;
  const CostModel* cm = nullptr;
  SolverOptions opts;
  AtomDecomposition dec;
  double r0 = 0.0;
  bool symmetric = false;
  Problem full;
  ZeroLoss zero;
  std::vector<Problem> atom_problems;
  std::vector<ZeroLoss> atom_zero;
  Vector atom_mass;     // sum of a over the atom
  Vector outside_cost;  // C(1_atom)

  Context(const Kernel& k, const CostModel& c, const SolverOptions& o) : ker(&k), cm(&c), opts(o) {
    if (!c.is_affine()) throw PreconditionError("frontier solvers need an affine cost");
    require_size(c.size(), k.size(), "cost model");
    full = make_problem(k, c, o.support_eps, o.spectral);
    dec = decompose(k, o.support_eps, o.spectral);
    r0 = dec.radius();
    symmetric = has_symmetric_support(k, o.support_eps);
    zero = zero_loss(full, dec, symmetric);
    for (const IndexSet& atom : dec.atoms) {
      const Kernel sub = restrict(k, atom);
      const CostModel sub_cm = c.restrict(atom);
      Problem sp = make_problem(sub, sub_cm, o.support_eps, o.spectral);
      AtomDecomposition sd;
      sd.atoms.push_back(IndexSet{});
      for (std::size_t q = 0; q < atom.size(); ++q) sd.atoms.back().push_back(q);
      sd.radii.push_back(1.0);
      atom_zero.push_back(zero_loss(sp, sd, symmetric));
      atom_mass.push_back(sp.amass);
      outside_cost.push_back(full.amass - sp.amass);
      atom_problems.push_back(std::move(sp));
    }
  }

  double c_max() const { return full.amass; }

  Vector embed(std::size_t atom, const Vector& local, double fill) const {
    Vector eta(full.n, fill);
    const IndexSet& idx = dec.atoms[atom];
    for (std::size_t q = 0; q < idx.size(); ++q) eta[idx[q]] = local[q];
    return eta;
  }

  std::vector<Vector> atom_indicators() const {
    std::vector<Vector> h;
    for (std::size_t i = 0; i < dec.atoms.size(); ++i) h.push_back(embed(i, Vector(dec.atoms[i].size(), 1.0), 0.0));
    return h;
  }

  double check_level(double l) const {
    const double tol = 1e-9 * (1.0 + r0);
    if (!(l >= -tol) || !(l <= r0 + tol)) throw InputError("loss level outside [0, R_0]");
    return std::clamp(l, 0.0, r0);
  }

  double check_budget(double c) const {
    const double tol = 1e-12 * (1.0 + c_max());
    if (!(c >= -tol) || !(c <= c_max() + tol)) throw InputError("budget outside [0, c_max]");
    return std::clamp(c, 0.0, c_max());
  }
};

inline Solution finish_cost(const Context& ctx, Vector eta) {
  clamp01(eta);
  Strategy s(std::move(eta));
  return {ctx.cm->evaluate(s), std::move(s)};
}

inline Solution finish_loss(const Context& ctx, Vector eta) {
  clamp01(eta);
  Strategy s(std::move(eta));
  return {effective_r(*ctx.ker, s, ctx.opts.spectral), std::move(s)};
}

// Pareto strategy at level l assembled atom by atom (eta = 1 off the atoms).
inline Vector pareto_by_atoms(const Context& ctx, double l) {
  Vector eta(ctx.full.n, 1.0);
  for (std::size_t i = 0; i < ctx.dec.atoms.size(); ++i) {
    if (l >= ctx.dec.radii[i]) continue;
    Vector local = l <= 0.0 ? ctx.atom_zero[i].eta
                            : solve_pareto_cost(ctx.atom_problems[i], l, {ctx.atom_zero[i].eta}, ctx.opts).eta;
    const IndexSet& idx = ctx.dec.atoms[i];
    for (std::size_t q = 0; q < idx.size(); ++q) eta[idx[q]] = local[q];
  }
  return eta;
}

inline Solution optimal_cost(const Context& ctx, double l) {
  l = ctx.check_level(l);
  const std::size_t n = ctx.full.n;
  if (ctx.r0 <= 0.0 || l >= ctx.r0) return finish_cost(ctx, Vector(n, 1.0));
  if (l == 0.0) return finish_cost(ctx, ctx.zero.eta);
  if (ctx.opts.decompose) return finish_cost(ctx, pareto_by_atoms(ctx, l));
  std::vector<Vector> hints = {ctx.zero.eta};
  return finish_cost(ctx, solve_pareto_cost(ctx.full, l, hints, ctx.opts).eta);
}

inline Solution optimal_loss_local(const Context& ctx, double c) {
  const std::size_t n = ctx.full.n;
  if (c >= ctx.c_max()) return finish_loss(ctx, Vector(n, 0.0));
  if (c == 0.0 || ctx.r0 <= 0.0) return finish_loss(ctx, Vector(n, 1.0));
  const double b = ctx.c_max() - c;
  if (c >= ctx.zero.cost) return finish_loss(ctx, project_budget(ctx.zero.eta, ctx.full.a, b));

  if (!ctx.opts.decompose) {
    std::vector<Vector> hints = {project_budget(ctx.zero.eta, ctx.full.a, b)};
    for (const Vector& h : ctx.atom_indicators()) hints.push_back(project_budget(h, ctx.full.a, b));
    return finish_loss(ctx, solve_pareto_loss(ctx.full, b, hints, ctx.opts).eta);
  }

  if (ctx.dec.atoms.size() == 1) {
    const Problem& p = ctx.atom_problems[0];
    const double bl = p.amass - c;
    if (bl <= 0.0) return finish_loss(ctx, ctx.embed(0, Vector(p.n, 0.0), 1.0));
    std::vector<Vector> hints = {project_budget(ctx.atom_zero[0].eta, p.a, bl)};
    return finish_loss(ctx, ctx.embed(0, solve_pareto_loss(p, bl, hints, ctx.opts).eta, 1.0));
  }

  // Several atoms: C_star(l) = sum_i C_i(min(l, R_0i)) is decreasing; invert it.
  std::map<double, Vector> memo;
  auto at = [&](double l) -> const Vector& {
    auto it = memo.find(l);
    if (it == memo.end()) it = memo.emplace(l, pareto_by_atoms(ctx, l)).first;
    return it->second;
  };
  auto h = [&](double l) { return ctx.cm->evaluate(Strategy(at(l))) - c; };
  const double h0 = h(0.0);
  if (h0 <= 0.0) return finish_loss(ctx, project_budget(at(0.0), ctx.full.a, b));
  std::uintmax_t iters = 80;
  const auto r = boost::math::tools::toms748_solve(h, 0.0, ctx.r0, h0, -c,
                                                   boost::math::tools::eps_tolerance<double>(44), iters);
  Vector eta = at(r.second);
  if (ctx.full.value(eta) > b) eta = project_budget(eta, ctx.full.a, b);
  return finish_loss(ctx, std::move(eta));
}

// Projected gradient in budget mode cannot reach optima where several blocks
// tie, which cost mode produces naturally. Since R_e_star inverts C_star, probe
// C_star just below the local answer; when that level is affordable, root-find
// C_star(l) = c instead.
inline Solution optimal_loss(const Context& ctx, double c) {
  c = ctx.check_budget(c);
  Solution s = optimal_loss_local(ctx, c);
  if (s.value <= 0.0 || ctx.r0 <= 0.0 || c >= ctx.zero.cost) return s;
  if (ctx.opts.decompose && ctx.dec.atoms.size() > 1) return s;
  const double slack = 1e-12 * (1.0 + ctx.c_max());
  std::map<double, Solution> memo;
  auto at = [&](double l) -> const Solution& {
    auto it = memo.find(l);
    if (it == memo.end()) it = memo.emplace(l, optimal_cost(ctx, l)).first;
    return it->second;
  };
  const double probe = s.value * (1.0 - 1e-7);
  if (at(probe).value > c + slack) return s;
  auto h = [&](double l) { return at(l).value - c - slack; };
  const double h0 = h(0.0);
  if (h0 <= 0.0) return finish_loss(ctx, at(0.0).strategy.values());
  std::uintmax_t iters = 60;
  const auto r = boost::math::tools::toms748_solve(h, 0.0, probe, h0, h(probe),
                                                   boost::math::tools::eps_tolerance<double>(40), iters);
  Solution best = finish_loss(ctx, at(r.second).strategy.values());
  return best.value < s.value ? best : s;
}

inline Solution anti_optimal_cost(const Context& ctx, double l) {
  l = ctx.check_level(l);
  const std::size_t n = ctx.full.n;
  if (l <= 0.0 || ctx.r0 <= 0.0) return finish_cost(ctx, Vector(n, 0.0));

  if (!ctx.opts.decompose) {
    Local r = solve_anti_cost(ctx.full, l, ctx.atom_indicators(), ctx.opts);
    if (r.eta.empty()) throw NumericError("no start reached the loss floor");
    return finish_cost(ctx, std::move(r.eta));
  }

  std::optional<Solution> best;
  for (std::size_t i = 0; i < ctx.dec.atoms.size(); ++i) {
    const double ri = ctx.dec.radii[i];
    const double tol = 1e-12 * (1.0 + ri);
    if (ri < l - tol) continue;
    Vector local;
    if (l >= ri - tol) {
      local.assign(ctx.dec.atoms[i].size(), 1.0);
    } else {
      Local r = solve_anti_cost(ctx.atom_problems[i], l, {}, ctx.opts);
      if (r.eta.empty()) continue;
      local = std::move(r.eta);
    }
    Solution s = finish_cost(ctx, ctx.embed(i, local, 0.0));
    if (!best || s.value > best->value + 1e-12 * (1.0 + best->value) ||
        (s.value >= best->value - 1e-12 * (1.0 + best->value) && lex_less(s.strategy.values(), best->strategy.values())))
      best = std::move(s);
  }
  if (!best) throw NumericError("no atom reached the loss floor");
  return std::move(*best);
}

inline Solution anti_optimal_loss(const Context& ctx, double c) {
  c = ctx.check_budget(c);
  const std::size_t n = ctx.full.n;
  if (c >= ctx.c_max() || ctx.r0 <= 0.0) return finish_loss(ctx, Vector(n, 0.0));
  if (c == 0.0) return finish_loss(ctx, Vector(n, 1.0));

  if (!ctx.opts.decompose) {
    Local r = solve_anti_loss(ctx.full, ctx.c_max() - c, ctx.atom_indicators(), ctx.opts);
    return finish_loss(ctx, std::move(r.eta));
  }

  std::optional<Solution> best;
  for (std::size_t i = 0; i < ctx.dec.atoms.size(); ++i) {
    const Problem& p = ctx.atom_problems[i];
    Vector local;
    if (c <= ctx.outside_cost[i]) {
      local.assign(p.n, 1.0);
    } else {
      const double bl = p.amass - (c - ctx.outside_cost[i]);
      if (bl <= 0.0) {
        local.assign(p.n, 0.0);
      } else {
        local = solve_anti_loss(p, bl, {}, ctx.opts).eta;
      }
    }
    Solution s = finish_loss(ctx, ctx.embed(i, local, 0.0));
    if (!best || s.value > best->value + 1e-12 * (1.0 + best->value) ||
        (s.value >= best->value - 1e-12 * (1.0 + best->value) && lex_less(s.strategy.values(), best->strategy.values())))
      best = std::move(s);
  }
  return std::move(*best);
}

template <class Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) {
        try {
          fn(k);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!err) err = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

inline void sort_points(std::vector<FrontierPoint>& pts) {
  std::stable_sort(pts.begin(), pts.end(), [](const FrontierPoint& x, const FrontierPoint& y) {
    if (x.cost != y.cost) return x.cost < y.cost;
    return x.loss > y.loss;
  });
}

inline std::vector<double> check_grid(const Context& ctx, const std::vector<double>& grid) {
  if (grid.empty()) throw InputError("frontier grid is empty");
  std::vector<double> g;
  for (double l : grid) g.push_back(ctx.check_level(l));
  if (!std::is_sorted(g.begin(), g.end())) throw InputError("frontier grid must be sorted");
  return g;
}

}  // namespace detail

// Segments whose cost gap is large (above 1e-6 c_max) and whose slope exceeds
// ten times the slope of each neighbouring segment.
inline std::vector<std::size_t> detect_jumps(const std::vector<FrontierPoint>& pts, double c_max) {
  std::vector<std::size_t> jumps;
  if (pts.size() < 3) return jumps;
  const std::size_t segs = pts.size() - 1;
  Vector slope(segs), dc(segs);
  for (std::size_t k = 0; k < segs; ++k) {
    dc[k] = std::abs(pts[k + 1].cost - pts[k].cost);
    const double dl = std::abs(pts[k + 1].loss - pts[k].loss);
    slope[k] = dc[k] == 0.0 ? 0.0 : (dl == 0.0 ? std::numeric_limits<double>::infinity() : dc[k] / dl);
  }
  for (std::size_t k = 0; k < segs; ++k) {
    if (dc[k] <= 1e-6 * c_max) continue;
    bool steep = true;
    if (k > 0 && !(slope[k] > 10.0 * slope[k - 1])) steep = false;
    if (k + 1 < segs && !(slope[k] > 10.0 * slope[k + 1])) steep = false;
    if (steep) jumps.push_back(k);
  }
  return jumps;
}

// count equally spaced loss levels on [0, r0].
inline std::vector<double> default_grid(double r0, std::size_t count = 101) {
  if (r0 <= 0.0 || count < 2) return {0.0};
  std::vector<double> g(count);
  for (std::size_t k = 0; k < count; ++k) g[k] = static_cast<double>(k) * r0 / static_cast<double>(count - 1);
  g.back() = r0;
  return g;
}

// R_e_star(c) = min { R_e(eta) : C(eta) <= c }.
inline Solution optimal_loss(const Kernel& ker, const CostModel& cm, double c, const SolverOptions& opts = {}) {
  return detail::optimal_loss(detail::Context(ker, cm, opts), c);
}

// C_star(l) = min { C(eta) : R_e(eta) <= l }.
inline Solution optimal_cost(const Kernel& ker, const CostModel& cm, double l, const SolverOptions& opts = {}) {
  return detail::optimal_cost(detail::Context(ker, cm, opts), l);
}

// R_e^*(c) = max { R_e(eta) : C(eta) >= c }.
inline Solution anti_optimal_loss(const Kernel& ker, const CostModel& cm, double c, const SolverOptions& opts = {}) {
  return detail::anti_optimal_loss(detail::Context(ker, cm, opts), c);
}

// C^*(l) = max { C(eta) : R_e(eta) >= l }.
inline Solution anti_optimal_cost(const Kernel& ker, const CostModel& cm, double l, const SolverOptions& opts = {}) {
  return detail::anti_optimal_cost(detail::Context(ker, cm, opts), l);
}

inline Frontier pareto_frontier(const Kernel& ker, const CostModel& cm, const std::vector<double>& grid,
                                const SolverOptions& opts = {}) {
  const detail::Context ctx(ker, cm, opts);
  const std::vector<double> g = detail::check_grid(ctx, grid);
  Frontier f;
  f.kind = FrontierKind::pareto;
  f.points.resize(g.size());
  detail::parallel_for(g.size(), opts.threads, [&](std::size_t k) {
    Solution s = detail::optimal_cost(ctx, g[k]);
    const double loss = effective_r(ker, s.strategy, opts.spectral);
    f.points[k] = {s.value, loss, std::move(s.strategy), g[k]};
  });
  detail::sort_points(f.points);
  f.c_star = ctx.r0 > 0.0 ? cm.evaluate(Strategy(ctx.zero.eta)) : 0.0;
  f.c_star_exact = ctx.zero.exact;
  f.c_star_bound = ctx.r0 > 0.0 ? std::max(ctx.zero.bound, f.c_star) : 0.0;
  f.jumps = detect_jumps(f.points, cm.c_max());
  return f;
}

inline Frontier anti_pareto_frontier(const Kernel& ker, const CostModel& cm, const std::vector<double>& grid,
                                     const SolverOptions& opts = {}) {
  const detail::Context ctx(ker, cm, opts);
  const std::vector<double> g = detail::check_grid(ctx, grid);
  Frontier f;
  f.kind = FrontierKind::anti_pareto;
  f.points.resize(g.size());
  detail::parallel_for(g.size(), opts.threads, [&](std::size_t k) {
    Solution s = detail::anti_optimal_cost(ctx, g[k]);
    const double loss = effective_r(ker, s.strategy, opts.spectral);
    f.points[k] = {s.value, loss, std::move(s.strategy), g[k]};
  });
  detail::sort_points(f.points);
  f.c_star_upper = detail::anti_optimal_cost(ctx, ctx.r0).value;
  f.jumps = detect_jumps(f.points, cm.c_max());
  return f;
}

struct OptimalRay {
  double lambda_max = 0.0;            // 1 / sup eta_star
  std::vector<FrontierPoint> points;  // lambda from 0 to lambda_max
  FrontierPoint endpoint;             // (c_max, 0) at eta = 0
  double c_star = 0.0;
};

// Ray {lambda eta_star} of Pareto optimal strategies through an interior
// Pareto point, valid when R_e is convex (asserted by the caller) and the cost
// affine. Returns nullopt when eta_star is not Pareto optimal.
inline std::optional<OptimalRay> detect_optimal_ray(const Kernel& ker, const CostModel& cm, const Strategy& eta_star,
                                                    bool convex, const SolverOptions& opts = {},
                                                    std::size_t samples = 21) {
  if (!cm.is_affine()) throw PreconditionError("optimal ray needs an affine cost");
  if (!convex) throw PreconditionError("optimal ray needs R_e asserted convex");
  detail::require_size(eta_star.size(), ker.size(), "detect_optimal_ray");
  double sup = 0.0;
  for (double v : eta_star.values()) sup = std::max(sup, v);
  if (sup >= 1.0 - 1e-9) throw PreconditionError("optimal ray needs eta_star < 1 everywhere");
  const std::size_t n = ker.size();

  OptimalRay ray;
  ray.endpoint = {cm.c_max(), 0.0, Strategy::zeros(n)};
  ray.c_star = cm.c_max();
  if (sup == 0.0) {
    ray.lambda_max = 0.0;
    ray.points.push_back(ray.endpoint);
    return ray;
  }
  const double loss = effective_r(ker, eta_star, opts.spectral);
  const double r0 = basic_r(ker, opts.spectral);
  const Solution best = optimal_loss(ker, cm, cm.evaluate(eta_star), opts);
  if (best.value < loss - 1e-6 * (1.0 + r0)) return std::nullopt;

  ray.lambda_max = 1.0 / sup;
  samples = std::max<std::size_t>(samples, 2);
  for (std::size_t k = 0; k < samples; ++k) {
    const double lam = ray.lambda_max * static_cast<double>(k) / static_cast<double>(samples - 1);
    Vector e = eta_star.values();
    for (double& v : e) v = std::min(1.0, lam * v);
    Strategy s(std::move(e));
    const double r = effective_r(ker, s, opts.spectral);
    ray.points.push_back({cm.evaluate(s), r, s, r});
  }
  return ray;
}

struct AtomFrontier {
  IndexSet atom;     // trait indices in the full kernel
  Frontier pareto;   // intrinsic, on the restricted kernel and cost
  Frontier anti;     // intrinsic
  double radius = 0.0;
};

// Intrinsic frontiers of every atom on a common level set: the grid levels
// below the atom's radius plus every atom radius up to its own, so that
// combine_atom_frontiers finds each atom at each level it needs.
inline std::vector<AtomFrontier> atom_frontiers(const Kernel& ker, const CostModel& cm, const std::vector<double>& grid,
                                                const SolverOptions& opts = {}) {
  const AtomDecomposition dec = decompose(ker, opts.support_eps, opts.spectral);
  std::vector<AtomFrontier> out;
  for (std::size_t i = 0; i < dec.atoms.size(); ++i) {
    const double r = dec.radii[i];
    const double tol = 1e-12 * (1.0 + r);
    std::vector<double> levels;
    for (double l : grid)
      if (l < r - tol) levels.push_back(std::max(l, 0.0));
    for (double rj : dec.radii)
      if (rj <= r + tol) levels.push_back(std::min(rj, r));
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end(), [&](double x, double y) { return y - x <= tol; }),
                 levels.end());
    const Kernel sub = restrict(ker, dec.atoms[i]);
    const CostModel sc = cm.restrict(dec.atoms[i]);
    out.push_back({dec.atoms[i], pareto_frontier(sub, sc, levels, opts), anti_pareto_frontier(sub, sc, levels, opts), r});
  }
  return out;
}

// Global frontiers of a reducible kernel from intrinsic atom frontiers:
//   C_star(l) = sum_i C_i,star(min(l, R_0i))             (eta = 1 off the atoms)
//   C^*(l)    = max_{R_0i >= l} C_i^*(l) + C(1_atom_i)   (eta = 0 off the atom)
// Global levels are the union of the atoms' solved levels; a level is dropped
// when an atom needed for it has no point there (matching within 1e-9), so
// atom frontiers should come from atom_frontiers or share a level set.
inline std::pair<Frontier, Frontier> combine_atom_frontiers(const std::vector<AtomFrontier>& per_atom,
                                                            const CostModel& cm, const IndexSet& remainder) {
  if (!cm.is_affine()) throw PreconditionError("atom recombination needs an extensive cost");
  const std::size_t n = cm.size();
  std::vector<bool> seen(n, false);
  auto mark = [&](std::size_t v) {
    if (v >= n) throw InputError("trait index out of range");
    if (seen[v]) throw InputError("atoms and remainder overlap");
    seen[v] = true;
  };
  for (const AtomFrontier& af : per_atom)
    for (std::size_t v : af.atom) mark(v);
  for (std::size_t v : remainder) mark(v);

  const Vector& a = cm.masses();
  double r0 = 0.0;
  for (const AtomFrontier& af : per_atom) r0 = std::max(r0, af.radius);
  const double ltol = 1e-9 * (1.0 + r0);

  auto find = [&](const Frontier& f, double l) -> const FrontierPoint* {
    for (const FrontierPoint& p : f.points)
      if (std::abs(p.level - l) <= ltol) return &p;
    return nullptr;
  };
  auto union_levels = [&](bool pareto) {
    std::vector<double> lv;
    for (const AtomFrontier& af : per_atom)
      for (const FrontierPoint& p : (pareto ? af.pareto : af.anti).points)
        if (p.level <= r0 + ltol) lv.push_back(std::min(p.level, r0));
    std::sort(lv.begin(), lv.end());
    std::vector<double> out;
    for (double l : lv)
      if (out.empty() || l - out.back() > ltol) out.push_back(l);
    return out;
  };
  auto outside = [&](const IndexSet& atom) {
    std::vector<bool> in(n, false);
    for (std::size_t v : atom) in[v] = true;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (!in[i]) s += a[i];
    return s;
  };

  Frontier par, anti;
  par.kind = FrontierKind::pareto;
  anti.kind = FrontierKind::anti_pareto;

  if (per_atom.empty()) {
    par.points.push_back({0.0, 0.0, Strategy::ones(n), 0.0});
    anti.points.push_back({cm.c_max(), 0.0, Strategy::zeros(n), 0.0});
    anti.c_star_upper = cm.c_max();
    return {par, anti};
  }

  for (double l : union_levels(true)) {
    Vector eta(n, 1.0);
    double loss = 0.0;
    bool ok = true;
    for (const AtomFrontier& af : per_atom) {
      if (l >= af.radius - ltol) {
        loss = std::max(loss, af.radius);
        continue;
      }
      const FrontierPoint* p = find(af.pareto, l);
      if (!p) {
        ok = false;
        break;
      }
      for (std::size_t q = 0; q < af.atom.size(); ++q) eta[af.atom[q]] = p->strategy[q];
      loss = std::max(loss, p->loss);
    }
    if (!ok) continue;
    Strategy s(std::move(eta));
    par.points.push_back({cm.evaluate(s), loss, std::move(s), l});
  }
  par.c_star = 0.0;
  par.c_star_exact = true;
  for (const AtomFrontier& af : per_atom) {
    par.c_star += af.pareto.c_star;
    par.c_star_bound += std::max(af.pareto.c_star_bound, af.pareto.c_star);
    par.c_star_exact = par.c_star_exact && af.pareto.c_star_exact;
  }

  for (double l : union_levels(false)) {
    std::optional<FrontierPoint> best;
    for (const AtomFrontier& af : per_atom) {
      if (af.radius < l - ltol) continue;
      Vector eta(n, 0.0);
      double loss;
      if (l >= af.radius - ltol) {
        for (std::size_t v : af.atom) eta[v] = 1.0;
        loss = af.radius;
      } else {
        const FrontierPoint* p = find(af.anti, l);
        if (!p) continue;
        for (std::size_t q = 0; q < af.atom.size(); ++q) eta[af.atom[q]] = p->strategy[q];
        loss = p->loss;
      }
      Strategy s(std::move(eta));
      const double c = cm.evaluate(s);
      if (!best || c > best->cost + 1e-12 * (1.0 + best->cost)) best = FrontierPoint{c, loss, std::move(s), l};
    }
    if (best) anti.points.push_back(std::move(*best));
  }
  anti.c_star_upper = 0.0;
  for (const AtomFrontier& af : per_atom)
    if (af.radius >= r0 - ltol) anti.c_star_upper = std::max(anti.c_star_upper, af.anti.c_star_upper + outside(af.atom));

  detail::sort_points(par.points);
  detail::sort_points(anti.points);
  par.jumps = detect_jumps(par.points, cm.c_max());
  anti.jumps = detect_jumps(anti.points, cm.c_max());
  return {par, anti};
}

}  // namespace refrontier
