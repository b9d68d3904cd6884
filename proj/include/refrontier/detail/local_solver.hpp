#pragma once

// Local solvers behind the frontier routines. All four problems live on an
// affine cost C(eta) = sum(a) - a.eta and are solved by multi-start projected
// (or tangent-projected) gradient steps, followed by a derivative-free polish.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "refrontier/cost.hpp"
#include "refrontier/decomposition.hpp"
#include "refrontier/error.hpp"
#include "refrontier/kernel.hpp"
#include "refrontier/matrix.hpp"
#include "refrontier/scc.hpp"
#include "refrontier/spectral.hpp"

namespace refrontier {

struct SolverOptions {
  std::size_t multistarts = 16;
  std::uint64_t seed = 0;
  std::size_t max_iter = 400;
  // Solve per atom and recombine; false runs the local solvers on the whole kernel.
  bool decompose = true;
  double support_eps = 0.0;
  // Worker threads for frontier grids; 0 means hardware concurrency.
  std::size_t threads = 1;
  bool polish = true;
  SpectralOptions spectral;
};

namespace detail {

// Kernel data of one optimisation problem: kmu(i,j) = k(i,j) mu(j) and the
// cost masses a.
struct Problem {
  Matrix kmu;
  Vector a;
  double amass = 0.0;
  std::size_t n = 0;
  SpectralOptions sopts;

  Matrix op(const Vector& eta) const {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m(i, j) = kmu(i, j) * eta[j];
    return m;
  }

  BlockStructure blocks(const Vector& eta) const { return block_structure(op(eta), sopts); }
  double radius(const Vector& eta) const { return blocks(eta).max_radius(); }

  // Radius of the block restricted to `blk`, assuming eta > 0 on it so that
  // the block stays irreducible.
  double block_radius(const IndexSet& blk, const Vector& eta) const {
    if (blk.size() == 1) return kmu(blk[0], blk[0]) * eta[blk[0]];
    Matrix sub(blk.size(), blk.size());
    for (std::size_t p = 0; p < blk.size(); ++p)
      for (std::size_t q = 0; q < blk.size(); ++q) sub(p, q) = kmu(blk[p], blk[q]) * eta[blk[q]];
    return irreducible_radius(sub, sopts.rel_tol * (1.0 + sub.inf_norm()), sopts);
  }

  double value(const Vector& eta) const { return dot(a, eta); }
};

inline Problem make_problem(const Kernel& ker, const CostModel& cm, double eps, const SpectralOptions& sopts) {
  if (!cm.is_affine()) throw PreconditionError("frontier solvers need an affine cost");
  require_size(cm.size(), ker.size(), "cost model");
  Problem p;
  p.kmu = thresholded(ker, eps);
  p.a = cm.masses();
  p.n = ker.size();
  p.sopts = sopts;
  for (double v : p.a) p.amass += v;
  return p;
}

struct Local {
  Vector eta;
  double score = -std::numeric_limits<double>::infinity();  // higher is better
};

inline bool lex_less(const Vector& x, const Vector& y) {
  return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end());
}

// Strictly better score, or equal within 1e-12 relative and lexicographically smaller.
inline bool better(const Local& x, const Local& y) {
  if (y.eta.empty()) return !x.eta.empty();
  const double tol = 1e-12 * (1.0 + std::abs(y.score));
  if (x.score > y.score + tol) return true;
  if (x.score < y.score - tol) return false;
  return lex_less(x.eta, y.eta);
}

inline std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t mode, double level) {
  return splitmix(splitmix(splitmix(seed) ^ mode) ^ std::bit_cast<std::uint64_t>(level));
}

enum Mode : std::uint64_t { pareto_cost = 1, pareto_loss = 2, anti_cost = 3, anti_loss = 4 };

// 1, three uniform levels, a few corners 1 - e_i, then uniform random points.
inline std::vector<Vector> make_starts(std::size_t n, std::size_t count, std::uint64_t seed) {
  std::vector<Vector> s;
  s.push_back(Vector(n, 1.0));
  for (double lam : {0.75, 0.5, 0.25}) s.push_back(Vector(n, lam));
  const std::size_t corners = std::min<std::size_t>(n, count > 6 ? count - 6 : 0);
  for (std::size_t i = 0; i < corners && n > 1; ++i) {
    Vector v(n, 1.0);
    v[i] = 0.0;
    s.push_back(std::move(v));
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  while (s.size() < std::max<std::size_t>(count, 1)) {
    Vector v(n);
    for (double& x : v) x = unif(rng);
    s.push_back(std::move(v));
  }
  s.resize(std::max<std::size_t>(count, 1));
  return s;
}

// Indicator vectors of trait subsets: every nonempty subset when there are at
// most `limit` of them, else `limit` random ones of random density.
inline std::vector<Vector> support_patterns(std::size_t n, std::size_t limit, std::uint64_t seed) {
  std::vector<Vector> out;
  if (n < 63 && (std::uint64_t{1} << n) - 1 <= limit) {
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
      Vector v(n, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        if (mask >> i & 1) v[i] = 1.0;
      out.push_back(std::move(v));
    }
    return out;
  }
  std::mt19937_64 rng(seed ^ 0x5bd1e995ULL);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  while (out.size() < limit) {
    const double density = 0.15 + 0.7 * unif(rng);
    Vector v(n, 0.0);
    for (double& x : v) x = unif(rng) < density ? 1.0 : 0.0;
    out.push_back(std::move(v));
  }
  return out;
}

// Map every support pattern to a feasible point and keep the `keep` best
// distinct ones as extra starts. Near-binary optima sit on faces with several
// zero coordinates that interior starts rarely reach.
template <class Feasible>
std::vector<Vector> screen_supports(const Problem& p, std::size_t keep, std::uint64_t seed, Feasible&& feasible) {
  std::vector<Local> cands;
  for (Vector& s : support_patterns(p.n, 255, seed)) {
    std::optional<Local> r = feasible(std::move(s));
    if (r) cands.push_back(std::move(*r));
  }
  std::sort(cands.begin(), cands.end(), [](const Local& x, const Local& y) { return better(x, y); });
  std::vector<Vector> out;
  for (Local& c : cands) {
    if (out.size() >= keep) break;
    bool dup = false;
    for (const Vector& o : out) {
      double d = 0.0;
      for (std::size_t i = 0; i < p.n; ++i) d = std::max(d, std::abs(o[i] - c.eta[i]));
      if (d <= 1e-9) dup = true;
    }
    if (!dup) out.push_back(std::move(c.eta));
  }
  return out;
}

inline void clamp01(Vector& v) {
  for (double& x : v) x = std::clamp(x, 0.0, 1.0);
}

// Euclidean projection onto {x in [0,1]^n : a.x = b}: x = clamp(y - tau a).
inline Vector project_budget(const Vector& y, const Vector& a, double b) {
  const std::size_t n = y.size();
  double total = 0.0;
  for (double v : a) total += v;
  if (b >= total) return Vector(n, 1.0);
  if (b <= 0.0) return Vector(n, 0.0);
  auto at = [&](double tau) {
    double h = 0.0;
    for (std::size_t i = 0; i < n; ++i) h += a[i] * std::clamp(y[i] - tau * a[i], 0.0, 1.0);
    return h;
  };
  Vector bp;
  bp.reserve(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    bp.push_back((y[i] - 1.0) / a[i]);
    bp.push_back(y[i] / a[i]);
  }
  std::sort(bp.begin(), bp.end());
  // h is nonincreasing in tau: find the last breakpoint with h >= b.
  std::size_t lo = 0, hi = bp.size() - 1;
  if (at(bp.front()) < b) {
    lo = hi = 0;
  } else {
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      if (at(bp[mid]) >= b) lo = mid; else hi = mid;
    }
  }
  const double h_lo = at(bp[lo]), h_hi = at(bp[hi]);
  double tau = bp[lo];
  if (h_lo > b && h_lo > h_hi) tau = bp[lo] + (h_lo - b) / (h_lo - h_hi) * (bp[hi] - bp[lo]);
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::clamp(y[i] - tau * a[i], 0.0, 1.0);
  return x;
}

// Scale eta on block `blk` (current radius rho > 0) so that its radius becomes
// l, clamping entries at 1. Returns false when even eta = 1 on the block stays
// below l. With `upper` the root bracket end at or above l is kept.
inline bool scale_block_to(const Problem& p, Vector& eta, const IndexSet& blk, double rho, double l, bool upper) {
  if (rho == l) return true;
  if (rho > l) {
    const double t = l / rho;
    for (std::size_t v : blk) eta[v] *= t;
    return true;
  }
  double mx = 0.0, mn = 1.0;
  for (std::size_t v : blk) {
    mx = std::max(mx, eta[v]);
    mn = std::min(mn, eta[v]);
  }
  const double t_lin = l / rho;
  if (t_lin * mx <= 1.0) {
    for (std::size_t v : blk) eta[v] *= t_lin;
    return true;
  }
  Vector sat = eta;
  for (std::size_t v : blk) sat[v] = 1.0;
  const double r1 = p.block_radius(blk, sat);
  if (r1 <= l) {
    eta = std::move(sat);
    return r1 >= l * (1.0 - 1e-12);
  }
  auto f = [&](double t) {
    Vector e = eta;
    for (std::size_t v : blk) e[v] = std::min(1.0, t * eta[v]);
    return p.block_radius(blk, e) - l;
  };
  const double t_sat = 1.0 / mn;
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(f, 1.0, t_sat, rho - l, r1 - l,
                                                   boost::math::tools::eps_tolerance<double>(52), iters);
  const double t = upper ? r.second : r.first;
  for (std::size_t v : blk) eta[v] = std::min(1.0, t * eta[v]);
  return true;
}

// Loss cap R <= l: every block of the positive pattern is scaled down to l if
// above, or up (with clamping) towards l if below. Zero entries stay zero.
inline Vector retract_cap(const Problem& p, Vector eta, double l) {
  const BlockStructure bs = p.blocks(eta);
  for (std::size_t b = 0; b < bs.comps.size(); ++b) {
    const IndexSet& blk = bs.comps[b];
    if (blk.size() == 1 && eta[blk[0]] == 0.0) continue;
    if (bs.radii[b] <= 0.0) {
      // a singleton without self-loop is free
      for (std::size_t v : blk) eta[v] = 1.0;
      continue;
    }
    scale_block_to(p, eta, blk, bs.radii[b], l, false);
  }
  return eta;
}

// Loss floor R >= l: keep one binding block (the cheapest one already at or
// above l, else the largest), zero everything else and scale the block to l.
inline std::optional<Vector> retract_floor(const Problem& p, Vector eta, double l) {
  const BlockStructure bs = p.blocks(eta);
  std::size_t pick = bs.comps.size();
  double pick_cost = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < bs.comps.size(); ++b) {
    if (bs.radii[b] <= 0.0 || bs.radii[b] < l) continue;
    double c = 0.0;
    for (std::size_t v : bs.comps[b]) c += p.a[v] * eta[v];
    c *= l / bs.radii[b];
    if (c < pick_cost) {
      pick_cost = c;
      pick = b;
    }
  }
  if (pick == bs.comps.size()) {
    double best = 0.0;
    for (std::size_t b = 0; b < bs.comps.size(); ++b)
      if (bs.radii[b] > best) {
        best = bs.radii[b];
        pick = b;
      }
    if (pick == bs.comps.size()) return std::nullopt;
  }
  const IndexSet& blk = bs.comps[pick];
  Vector out(p.n, 0.0);
  for (std::size_t v : blk) out[v] = eta[v];
  if (!scale_block_to(p, out, blk, bs.radii[pick], l, true)) return std::nullopt;
  return out;
}

// Projection of v onto {d : g.d = 0 for every g in cons}, with coordinates at
// a bound held fixed when d would leave the box.
inline Vector tangent_direction(const Vector& v, const std::vector<Vector>& cons, const Vector& eta) {
  const std::size_t n = v.size();
  std::vector<bool> fixed(n, false);
  Vector d(n, 0.0);
  for (std::size_t round = 0; round <= n; ++round) {
    std::vector<const Vector*> rows;
    for (const Vector& g : cons) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        if (!fixed[i]) s += g[i] * g[i];
      if (s > 1e-300) rows.push_back(&g);
    }
    const std::size_t k = rows.size();
    Vector lam(k, 0.0);
    if (k > 0) {
      Matrix gram(k, k);
      Vector rhs(k, 0.0);
      double diag = 0.0;
      for (std::size_t r = 0; r < k; ++r) {
        for (std::size_t c = 0; c < k; ++c) {
          double s = 0.0;
          for (std::size_t i = 0; i < n; ++i)
            if (!fixed[i]) s += (*rows[r])[i] * (*rows[c])[i];
          gram(r, c) = s;
        }
        diag = std::max(diag, gram(r, r));
        for (std::size_t i = 0; i < n; ++i)
          if (!fixed[i]) rhs[r] += (*rows[r])[i] * v[i];
      }
      for (std::size_t r = 0; r < k; ++r) gram(r, r) += 1e-13 * diag;
      lam = solve_linear(std::move(gram), std::move(rhs));
    }
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (fixed[i]) {
        d[i] = 0.0;
        continue;
      }
      double di = v[i];
      for (std::size_t r = 0; r < k; ++r) di -= lam[r] * (*rows[r])[i];
      d[i] = di;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (fixed[i]) continue;
      if ((d[i] > 0.0 && eta[i] >= 1.0) || (d[i] < 0.0 && eta[i] <= 0.0)) {
        fixed[i] = true;
        changed = true;
      }
    }
    if (!changed) return d;
  }
  return Vector(n, 0.0);
}

// Cost-mode steps: maximise sign * a.eta on the loss constraint surface.
// sign = +1 caps the loss (Pareto), sign = -1 floors it (anti-Pareto).
inline Local cost_mode_descent(const Problem& p, Vector eta, double l, int sign, std::size_t max_iter) {
  const double sigma = 1e-4;
  auto retract = [&](Vector x) -> std::optional<Vector> {
    if (sign > 0) return retract_cap(p, std::move(x), l);
    return retract_floor(p, std::move(x), l);
  };
  double obj = p.value(eta);
  double step = 0.0;
  std::size_t stall = 0;
  Vector v(p.n);
  for (std::size_t i = 0; i < p.n; ++i) v[i] = sign * p.a[i];
  double anorm = 0.0;
  for (double x : p.a) anorm = std::max(anorm, x);

  for (std::size_t it = 0; it < max_iter; ++it) {
    const Matrix m = p.op(eta);
    const BlockStructure bs = block_structure(m, p.sopts);
    std::vector<Vector> cons;
    for (std::size_t b = 0; b < bs.comps.size(); ++b) {
      if (bs.radii[b] <= 0.0) continue;
      if (sign > 0 && bs.radii[b] < l * (1.0 - 1e-9)) continue;
      cons.push_back(branch_gradient(p.kmu, m, bs, b, true, p.sopts));
    }
    const Vector d = tangent_direction(v, cons, eta);
    double dn2 = 0.0, dinf = 0.0;
    for (double x : d) {
      dn2 += x * x;
      dinf = std::max(dinf, std::abs(x));
    }
    if (dinf <= 1e-12 * anorm) break;
    if (step == 0.0) step = 0.5 / dinf;
    bool accepted = false;
    Vector trial;
    double tobj = obj;
    while (step * dinf > 1e-14) {
      trial = eta;
      for (std::size_t i = 0; i < p.n; ++i) trial[i] += step * d[i];
      clamp01(trial);
      auto r = retract(std::move(trial));
      if (r) {
        trial = std::move(*r);
        tobj = p.value(trial);
        if (sign * (tobj - obj) >= sigma * step * dn2) {
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) break;
    const double gain = sign * (tobj - obj);
    eta = std::move(trial);
    obj = tobj;
    if (gain <= 1e-15 * (1.0 + p.amass)) {
      if (++stall >= 3) break;
    } else {
      stall = 0;
    }
    step *= 2.0;
  }
  return {eta, sign * obj};
}

// Budget-mode steps on S_b = {a.eta = b}: minimise (sign = -1) or maximise
// (sign = +1) R by projected gradient with Armijo backtracking.
inline Local budget_mode_descent(const Problem& p, Vector eta, double b, int sign, std::size_t max_iter) {
  const double sigma = 1e-4;
  BlockStructure bs = p.blocks(eta);
  double f = bs.max_radius();
  double step = 0.0;
  std::size_t stall = 0;
  for (std::size_t it = 0; it < max_iter; ++it) {
    if (f <= 0.0) break;
    const Matrix m = p.op(eta);
    Vector g(p.n, 0.0);
    std::size_t top = 0;
    for (std::size_t k = 0; k < bs.radii.size(); ++k)
      if (bs.radii[k] > bs.radii[top]) top = k;
    for (std::size_t k = 0; k < bs.radii.size(); ++k) {
      const bool use = sign < 0 ? bs.radii[k] >= f * (1.0 - 1e-8) : k == top;
      if (!use) continue;
      const Vector gk = branch_gradient(p.kmu, m, bs, k, true, p.sopts);
      for (std::size_t i = 0; i < p.n; ++i) g[i] += gk[i];
    }
    double ginf = 0.0;
    for (double x : g) ginf = std::max(ginf, std::abs(x));
    if (ginf == 0.0) break;
    if (step == 0.0) step = 0.5 / ginf;
    bool accepted = false;
    Vector trial;
    BlockStructure tbs;
    double tf = f;
    while (true) {
      Vector y = eta;
      for (std::size_t i = 0; i < p.n; ++i) y[i] += sign * step * g[i];
      trial = project_budget(y, p.a, b);
      double moved = 0.0, pred = 0.0;
      for (std::size_t i = 0; i < p.n; ++i) {
        moved = std::max(moved, std::abs(trial[i] - eta[i]));
        pred += g[i] * (trial[i] - eta[i]);
      }
      if (moved <= 1e-15) break;
      tbs = p.blocks(trial);
      tf = tbs.max_radius();
      if (sign * (tf - f) >= sigma * sign * pred && sign * (tf - f) > 0.0) {
        accepted = true;
        break;
      }
      step *= 0.5;
      if (step * ginf < 1e-15) break;
    }
    if (!accepted) break;
    const double gain = sign * (tf - f);
    eta = std::move(trial);
    bs = std::move(tbs);
    f = tf;
    if (gain <= 1e-15 * (1.0 + f)) {
      if (++stall >= 3) break;
    } else {
      stall = 0;
    }
    step *= 2.0;
  }
  return {eta, sign * f};
}

// Derivative-free pair moves eta_i += d/a_i, eta_j -= d/a_j (cost-neutral),
// each candidate mapped to a feasible point and scored by `eval`.
template <class Eval>
Local pair_polish(const Problem& p, Local cur, Eval&& eval, std::size_t max_rounds = 8) {
  if (p.n < 2) return cur;
  for (double rel : {1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8}) {
    const double delta = rel * p.amass;
    for (std::size_t round = 0; round < max_rounds; ++round) {
      bool improved = false;
      for (std::size_t i = 0; i < p.n; ++i)
        for (std::size_t j = 0; j < p.n; ++j) {
          if (i == j) continue;
          const double dd = std::min({delta, (1.0 - cur.eta[i]) * p.a[i], cur.eta[j] * p.a[j]});
          if (dd <= 0.0) continue;
          Vector cand = cur.eta;
          cand[i] = std::min(1.0, cand[i] + dd / p.a[i]);
          cand[j] = std::max(0.0, cand[j] - dd / p.a[j]);
          std::optional<Local> r = eval(std::move(cand));
          if (r && r->score > cur.score + 1e-15 * (1.0 + std::abs(cur.score))) {
            cur = std::move(*r);
            improved = true;
          }
        }
      if (!improved) break;
    }
  }
  return cur;
}

inline IndexSet top_block(const Problem& p, const Vector& eta) {
  const BlockStructure bs = p.blocks(eta);
  std::size_t top = 0;
  for (std::size_t k = 0; k < bs.radii.size(); ++k)
    if (bs.radii[k] > bs.radii[top]) top = k;
  return bs.comps.empty() ? IndexSet{} : bs.comps[top];
}

inline std::size_t tied_blocks(const Problem& p, const Vector& eta, double rel) {
  const BlockStructure bs = p.blocks(eta);
  const double f = bs.max_radius();
  std::size_t c = 0;
  for (double r : bs.radii)
    if (f > 0.0 && r >= f * (1.0 - rel)) ++c;
  return c;
}

// max a.eta subject to R(eta) <= l.
inline Local solve_pareto_cost(const Problem& p, double l, const std::vector<Vector>& hints,
                               const SolverOptions& opts) {
  const std::uint64_t seed = mix_seed(opts.seed, pareto_cost, l);
  std::vector<Vector> starts = make_starts(p.n, opts.multistarts, seed);
  starts.insert(starts.end(), hints.begin(), hints.end());
  for (Vector& v : screen_supports(p, opts.multistarts, seed, [&](Vector c) -> std::optional<Local> {
         Vector e = retract_cap(p, std::move(c), l);
         const double v = p.value(e);
         return Local{std::move(e), v};
       }))
    starts.push_back(std::move(v));
  Local best;
  for (const Vector& s : starts) {
    Vector e = retract_cap(p, s, l);
    Local r = cost_mode_descent(p, std::move(e), l, +1, opts.max_iter);
    if (better(r, best)) best = std::move(r);
  }
  if (opts.polish) {
    best = pair_polish(p, best, [&](Vector c) -> std::optional<Local> {
      Vector e = retract_cap(p, std::move(c), l);
      const double v = p.value(e);
      return Local{std::move(e), v};
    });
  }
  return best;
}

// min a.eta subject to R(eta) >= l; empty eta when no start is feasible.
inline Local solve_anti_cost(const Problem& p, double l, const std::vector<Vector>& hints,
                             const SolverOptions& opts) {
  const std::uint64_t seed = mix_seed(opts.seed, anti_cost, l);
  std::vector<Vector> starts = make_starts(p.n, opts.multistarts, seed);
  starts.insert(starts.end(), hints.begin(), hints.end());
  for (Vector& v : screen_supports(p, opts.multistarts, seed, [&](Vector c) -> std::optional<Local> {
         std::optional<Vector> e = retract_floor(p, std::move(c), l);
         if (!e) return std::nullopt;
         const double v = -p.value(*e);
         return Local{std::move(*e), v};
       }))
    starts.push_back(std::move(v));
  Local best;
  for (const Vector& s : starts) {
    std::optional<Vector> e = retract_floor(p, s, l);
    if (!e) continue;
    Local r = cost_mode_descent(p, std::move(*e), l, -1, opts.max_iter);
    if (better(r, best)) best = std::move(r);
  }
  if (opts.polish && !best.eta.empty()) {
    best = pair_polish(p, best, [&](Vector c) -> std::optional<Local> {
      std::optional<Vector> e = retract_floor(p, std::move(c), l);
      if (!e) return std::nullopt;
      const double v = -p.value(*e);
      return Local{std::move(*e), v};
    });
  }
  return best;
}

// Close the gap left by ties between blocks: find the loss level whose local
// cost-mode optimum spends exactly the budget b, warm-starting from eta.
inline Local level_polish(const Problem& p, const Local& cur, double b, const SolverOptions& opts) {
  const double f_hi = -cur.score;
  if (f_hi <= 0.0) return cur;
  Vector warm = cur.eta;
  auto value_at = [&](double l) {
    Local r = cost_mode_descent(p, retract_cap(p, warm, l), l, +1, opts.max_iter);
    return r;
  };
  auto gap = [&](double l) { return value_at(l).score - b; };
  const double g_hi = gap(f_hi);
  if (g_hi <= 1e-13 * (1.0 + p.amass)) return cur;
  double l_lo = f_hi, g_lo = g_hi;
  double shrink = 1e-3;
  for (int k = 0; k < 60 && g_lo > 0.0; ++k) {
    l_lo = f_hi * std::max(0.0, 1.0 - shrink);
    if (l_lo <= 0.0) break;
    g_lo = gap(l_lo);
    shrink *= 2.0;
  }
  if (l_lo <= 0.0 || g_lo > 0.0) return cur;
  std::uintmax_t iters = 80;
  const auto r = boost::math::tools::toms748_solve(gap, l_lo, f_hi, g_lo, g_hi,
                                                   boost::math::tools::eps_tolerance<double>(48), iters);
  Local at = value_at(r.second);
  if (at.score < b) return cur;
  Vector e = project_budget(at.eta, p.a, b);
  const double f = p.radius(e);
  if (f < f_hi) return Local{std::move(e), -f};
  return cur;
}

// min R(eta) subject to a.eta = b.
inline Local solve_pareto_loss(const Problem& p, double b, const std::vector<Vector>& hints,
                               const SolverOptions& opts) {
  const std::uint64_t seed = mix_seed(opts.seed, pareto_loss, b);
  std::vector<Vector> starts = make_starts(p.n, opts.multistarts, seed);
  starts.insert(starts.end(), hints.begin(), hints.end());
  for (Vector& v : screen_supports(p, opts.multistarts, seed, [&](Vector c) -> std::optional<Local> {
         Vector e = project_budget(c, p.a, b);
         const double f = p.radius(e);
         return Local{std::move(e), -f};
       }))
    starts.push_back(std::move(v));
  Local best;
  for (const Vector& s : starts) {
    Local r = budget_mode_descent(p, project_budget(s, p.a, b), b, -1, opts.max_iter);
    if (better(r, best)) best = std::move(r);
  }
  if (opts.polish) {
    best = pair_polish(p, best, [&](Vector c) -> std::optional<Local> {
      const double f = p.radius(c);
      return Local{std::move(c), -f};
    });
    if (tied_blocks(p, best.eta, 1e-6) > 1) best = level_polish(p, best, b, opts);
  }
  return best;
}

// max R(eta) subject to a.eta = b; the result keeps only its dominant block,
// which can only lower a.eta.
inline Local solve_anti_loss(const Problem& p, double b, const std::vector<Vector>& hints,
                             const SolverOptions& opts) {
  const std::uint64_t seed = mix_seed(opts.seed, anti_loss, b);
  std::vector<Vector> starts = make_starts(p.n, opts.multistarts, seed);
  for (const Vector& h : hints) starts.push_back(project_budget(h, p.a, b));
  for (Vector& v : screen_supports(p, opts.multistarts, seed, [&](Vector c) -> std::optional<Local> {
         Vector e = project_budget(c, p.a, b);
         const double f = p.radius(e);
         return Local{std::move(e), f};
       }))
    starts.push_back(std::move(v));
  Local best;
  for (const Vector& s : starts) {
    Local r = budget_mode_descent(p, project_budget(s, p.a, b), b, +1, opts.max_iter);
    if (better(r, best)) best = std::move(r);
  }
  if (opts.polish) {
    best = pair_polish(p, best, [&](Vector c) -> std::optional<Local> {
      const double f = p.radius(c);
      return Local{std::move(c), f};
    });
  }
  if (best.score > 0.0) {
    const IndexSet keep = top_block(p, best.eta);
    Vector e(p.n, 0.0);
    for (std::size_t v : keep) e[v] = best.eta[v];
    best.eta = std::move(e);
  }
  return best;
}

}  // namespace detail
}  // namespace refrontier
