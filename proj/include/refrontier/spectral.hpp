#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <optional>
#include <vector>

#include "refrontier/error.hpp"
#include "refrontier/kernel.hpp"
#include "refrontier/matrix.hpp"
#include "refrontier/scc.hpp"

namespace refrontier {

struct SpectralOptions {
  // Absolute eigenvalue tolerance is rel_tol * (1 + ||M||_inf).
  double rel_tol = 1e-10;
  // Eigenvector residual tolerance, relative to (1 + radius).
  double vector_tol = 1e-8;
  // 0 selects 10 n + 1000.
  std::size_t max_iter = 0;
};

struct PerronPair {
  double radius = 0.0;
  Vector right;  // sum(right) == 1
  Vector left;   // dot(left, right) == 1
  bool converged = false;
  std::size_t iterations = 0;
};

namespace detail {

inline void validate_nonnegative(const Matrix& m) {
  if (!m.square()) throw InputError("spectral routines need a square matrix");
  for (double v : m.data()) {
    if (!std::isfinite(v)) throw InputError("matrix has a non-finite entry");
    if (v < 0.0) throw InputError("matrix has a negative entry");
  }
}

inline std::size_t default_max_iter(std::size_t n, const SpectralOptions& opts) {
  return opts.max_iter != 0 ? opts.max_iter : 10 * n + 1000;
}

struct PowerResult {
  double radius = 0.0;
  Vector vec;  // positive, sum 1
  bool converged = false;
  std::size_t iterations = 0;
  double lo = 0.0, hi = 0.0;  // best bracket when not converged
};

// tI - b is a nonsingular M-matrix iff Gaussian elimination without pivoting
// keeps every pivot positive, which happens iff t > rho(b).
inline bool above_radius(const Matrix& b, double t) {
  const std::size_t m = b.rows();
  Matrix a(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) a(i, j) = (i == j ? t : 0.0) - b(i, j);
  for (std::size_t k = 0; k < m; ++k) {
    const double piv = a(k, k);
    if (!(piv > 0.0)) return false;
    for (std::size_t i = k + 1; i < m; ++i) {
      const double f = a(i, k) / piv;
      if (f == 0.0) continue;
      for (std::size_t j = k + 1; j < m; ++j) a(i, j) -= f * a(k, j);
    }
  }
  return true;
}

// Shifted power iteration on b + c I. The shift follows the current
// Collatz-Wielandt upper bound, which keeps the subdominant ratio away from 1
// even when ||b|| is much larger than rho. The bracket
// min_i (bx)_i/x_i <= rho <= max_i (bx)_i/x_i closes geometrically; once inside
// tolerance it keeps iterating until the bracket stops shrinking.
inline PowerResult shifted_power(const Matrix& b, double tol, double vec_tol, std::size_t max_iter) {
  const std::size_t m = b.rows();
  PowerResult res;
  res.vec.assign(m, 1.0 / static_cast<double>(m));
  if (m == 1) {
    res.radius = b(0, 0);
    res.converged = true;
    return res;
  }
  if (b.inf_norm() == 0.0) {
    res.converged = true;
    return res;
  }
  Vector& x = res.vec;
  Vector y(m);
  double best_width = std::numeric_limits<double>::infinity();
  double lo_best = 0.0, hi_best = std::numeric_limits<double>::infinity();
  std::size_t stale = 0;
  bool inside = false;
  std::size_t extra_budget = 0;
  for (std::size_t it = 0; it < max_iter; ++it) {
    res.iterations = it + 1;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0, resid = 0.0;
    double est = 0.0, xsum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double s = 0.0;
      const auto r = b.row(i);
      for (std::size_t j = 0; j < m; ++j) s += r[j] * x[j];
      y[i] = s;
      const double ratio = s / x[i];
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      est += s;
      xsum += x[i];
    }
    est /= xsum;
    lo_best = std::max(lo_best, lo);
    hi_best = std::min(hi_best, hi);
    for (std::size_t i = 0; i < m; ++i) resid = std::max(resid, std::abs(y[i] - est * x[i]) / xsum);
    const double width = hi - lo;
    res.radius = std::clamp(est, lo, hi);
    const bool ok = width <= tol && resid <= vec_tol * (1.0 + res.radius);
    if (ok && !inside) {
      inside = true;
      res.converged = true;
      extra_budget = it + 64;
    }
    if (inside) {
      if (width < best_width) {
        best_width = width;
        stale = 0;
      } else if (++stale >= 4) {
        break;
      }
      if (width <= 4.0 * std::numeric_limits<double>::epsilon() * hi || it >= extra_budget) break;
    }
    const double shift = hi > 0.0 ? hi : b.inf_norm();
    double norm = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      y[i] += shift * x[i];
      norm += y[i];
    }
    for (std::size_t i = 0; i < m; ++i) x[i] = y[i] / norm;
  }
  if (!res.converged) {
    res.radius = 0.5 * (lo_best + hi_best);
    res.lo = lo_best;
    res.hi = hi_best;
  }
  double s = 0.0;
  for (double v : x) s += v;
  for (double& v : x) v /= s;
  return res;
}

// Radius of an irreducible block. Power iteration first; if it stalls the
// Collatz-Wielandt bracket is closed by bisection on the M-matrix test.
inline double irreducible_radius(const Matrix& b, double tol, const SpectralOptions& opts) {
  PowerResult r = shifted_power(b, tol, std::numeric_limits<double>::infinity(), default_max_iter(b.rows(), opts));
  if (r.converged) return r.radius;
  double lo = r.lo, hi = r.hi;
  if (!(lo <= hi) || !std::isfinite(hi)) throw NumericError("power iteration did not converge on an irreducible block");
  for (int k = 0; k < 200 && hi - lo > 0.25 * tol; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (above_radius(b, mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

// SCC blocks of the support of m together with their spectral radii.
struct BlockStructure {
  std::vector<IndexSet> comps;
  Vector radii;

  double max_radius() const noexcept {
    double r = 0.0;
    for (double v : radii) r = std::max(r, v);
    return r;
  }
};

inline BlockStructure block_structure(const Matrix& m, const SpectralOptions& opts = {}) {
  BlockStructure bs;
  const double tol = opts.rel_tol * (1.0 + m.inf_norm());
  bs.comps = strongly_connected_components(m);
  bs.radii.reserve(bs.comps.size());
  for (const auto& c : bs.comps) {
    if (c.size() == 1) {
      bs.radii.push_back(m(c[0], c[0]));
    } else if (c.size() == m.rows()) {
      bs.radii.push_back(irreducible_radius(m, tol, opts));
    } else {
      bs.radii.push_back(irreducible_radius(m.principal(c), tol, opts));
    }
  }
  return bs;
}

// Dense solve with partial pivoting; a is overwritten.
inline Vector solve_linear(Matrix a, Vector rhs) {
  const std::size_t n = a.rows();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    if (a(piv, col) == 0.0) throw NumericError("singular system while extending eigenvectors");
    if (piv != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(piv, c), a(col, c));
      std::swap(rhs[piv], rhs[col]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a(r, col) / a(col, col);
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a(r, c) -= f * a(col, c);
      rhs[r] -= f * rhs[col];
    }
  }
  Vector x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = rhs[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a(i, c) * x[c];
    x[i] = s / a(i, i);
  }
  return x;
}

// Positive Perron vector (sum 1) of an irreducible block with known radius.
// Power iteration first, then inverse iteration just above rho, where
// (sigma I - b)^{-1} is a positive matrix.
inline Vector perron_vector(const Matrix& b, double rho, const SpectralOptions& opts) {
  const double tol = opts.rel_tol * (1.0 + b.inf_norm());
  PowerResult r = shifted_power(b, tol, opts.vector_tol, default_max_iter(b.rows(), opts));
  if (r.converged) return r.vec;
  const std::size_t m = b.rows();
  const double sigma = rho + std::max(1e-9 * (1.0 + rho), 64.0 * tol);
  Matrix a(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) a(i, j) = (i == j ? sigma : 0.0) - b(i, j);
  Vector x = r.vec;
  for (int it = 0; it < 50; ++it) {
    Vector y = solve_linear(a, x);
    double s = 0.0;
    for (double& v : y) {
      v = std::max(v, 0.0);
      s += v;
    }
    if (!(s > 0.0) || !std::isfinite(s)) break;
    double change = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      y[i] /= s;
      change = std::max(change, std::abs(y[i] - x[i]));
    }
    x = std::move(y);
    double resid = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double bx = 0.0;
      for (std::size_t j = 0; j < m; ++j) bx += b(i, j) * x[j];
      resid = std::max(resid, std::abs(bx - rho * x[i]));
    }
    if (resid <= opts.vector_tol * (1.0 + rho) || change <= 1e-15) return x;
  }
  throw NumericError("eigenvector iteration did not converge");
}

// Vertices reachable from (forward) or reaching (backward) the seed set,
// excluding the seed itself. Edges j -> i iff m(i,j) > 0.
inline IndexSet reach(const Matrix& m, const IndexSet& seed, bool forward) {
  const std::size_t n = m.rows();
  std::vector<bool> seen(n, false);
  std::deque<std::size_t> queue;
  for (std::size_t v : seed) {
    seen[v] = true;
    queue.push_back(v);
  }
  IndexSet found;
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop_front();
    for (std::size_t u = 0; u < n; ++u) {
      const double e = forward ? m(u, v) : m(v, u);
      if (e > 0.0 && !seen[u]) {
        seen[u] = true;
        found.push_back(u);
        queue.push_back(u);
      }
    }
  }
  std::sort(found.begin(), found.end());
  return found;
}

// Derivative of the eigenvalue carried by block `b` of m = kmu * diag(eta)
// with respect to every eta_j. With `extend`, right/left eigenvectors are
// continued to the downstream/upstream vertices, which captures the first
// order effect of raising a zero coordinate; this needs b's radius to be
// strictly above every block it is linked to, otherwise only coordinates of b
// get a derivative.
inline Vector branch_gradient(const Matrix& kmu, const Matrix& m, const BlockStructure& bs, std::size_t b,
                              bool extend, const SpectralOptions& opts = {}) {
  const std::size_t n = m.rows();
  const IndexSet& blk = bs.comps[b];
  const double rho = bs.radii[b];
  Vector u(n, 0.0), w(n, 0.0);
  if (blk.size() == 1) {
    u[blk[0]] = 1.0;
    w[blk[0]] = 1.0;
  } else {
    const Matrix sub = m.principal(blk);
    const Vector r = perron_vector(sub, rho, opts);
    const Vector l = perron_vector(sub.transposed(), rho, opts);
    for (std::size_t a = 0; a < blk.size(); ++a) {
      u[blk[a]] = r[a];
      w[blk[a]] = l[a];
    }
  }
  const double wu = [&] {
    double s = 0.0;
    for (std::size_t v : blk) s += w[v] * u[v];
    return s;
  }();

  if (extend && rho > 0.0) {
    const IndexSet down = reach(m, blk, true);
    const IndexSet up = reach(m, blk, false);
    const std::vector<std::size_t> label = component_labels(bs.comps, n);
    bool gap = true;
    for (const IndexSet* side : {&down, &up})
      for (std::size_t v : *side)
        if (bs.radii[label[v]] >= rho * (1.0 - 1e-8)) gap = false;
    if (gap) {
      if (!down.empty()) {
        Matrix a(down.size(), down.size());
        Vector rhs(down.size(), 0.0);
        for (std::size_t p = 0; p < down.size(); ++p) {
          for (std::size_t q = 0; q < down.size(); ++q) a(p, q) = -m(down[p], down[q]);
          a(p, p) += rho;
          for (std::size_t v : blk) rhs[p] += m(down[p], v) * u[v];
        }
        const Vector ud = solve_linear(std::move(a), std::move(rhs));
        for (std::size_t p = 0; p < down.size(); ++p) u[down[p]] = std::max(0.0, ud[p]);
      }
      if (!up.empty()) {
        Matrix a(up.size(), up.size());
        Vector rhs(up.size(), 0.0);
        for (std::size_t p = 0; p < up.size(); ++p) {
          for (std::size_t q = 0; q < up.size(); ++q) a(p, q) = -m(up[q], up[p]);
          a(p, p) += rho;
          for (std::size_t v : blk) rhs[p] += w[v] * m(v, up[p]);
        }
        const Vector wu_up = solve_linear(std::move(a), std::move(rhs));
        for (std::size_t p = 0; p < up.size(); ++p) w[up[p]] = std::max(0.0, wu_up[p]);
      }
    }
  }

  Vector g(n, 0.0);
  if (wu <= 0.0) return g;
  const Vector wk = multiply_left(w, kmu);
  for (std::size_t j = 0; j < n; ++j) g[j] = wk[j] * u[j] / wu;
  if (!extend) {
    Vector local(n, 0.0);
    for (std::size_t v : blk) local[v] = g[v];
    return local;
  }
  return g;
}

}  // namespace detail

// rho(M) for a nonnegative square matrix, computed blockwise over the strongly
// connected components of its support.
inline double spectral_radius(const Matrix& m, const SpectralOptions& opts = {}) {
  detail::validate_nonnegative(m);
  if (m.rows() == 0) return 0.0;
  if (m.inf_norm() == 0.0) return 0.0;
  return detail::block_structure(m, opts).max_radius();
}

// Effective reproduction number R_e(eta) = rho(k mu eta).
inline double effective_r(const Kernel& ker, const Strategy& eta, const SpectralOptions& opts = {}) {
  return spectral_radius(operator_matrix(ker, eta), opts);
}

inline double basic_r(const Kernel& ker, const SpectralOptions& opts = {}) {
  return spectral_radius(weighted_matrix(ker), opts);
}

// Perron root with right and left eigenvectors from shifted power iteration on
// the full matrix. Convergence is only guaranteed for irreducible input; a
// failure is reported through `converged`.
inline PerronPair perron_pair(const Matrix& m, const SpectralOptions& opts = {}) {
  detail::validate_nonnegative(m);
  const std::size_t n = m.rows();
  PerronPair pp;
  if (n == 0) return pp;
  const detail::BlockStructure bs = detail::block_structure(m, opts);
  pp.radius = bs.max_radius();
  if (n > 1 && bs.comps.size() == 1 && pp.radius > 0.0) {
    pp.right = detail::perron_vector(m, pp.radius, opts);
    pp.left = detail::perron_vector(m.transposed(), pp.radius, opts);
    const double wu = dot(pp.left, pp.right);
    for (double& v : pp.left) v /= wu;
    pp.converged = true;
    return pp;
  }
  const double tol = opts.rel_tol * (1.0 + m.inf_norm());
  const std::size_t budget = detail::default_max_iter(n, opts);

  auto iterate = [&](const Matrix& a, Vector& x, std::size_t& iters) {
    const double shift = a.inf_norm();
    x.assign(n, 1.0 / static_cast<double>(n));
    Vector y(n);
    for (std::size_t it = 0; it < budget; ++it) {
      ++iters;
      y = multiply(a, x);
      double resid = 0.0, xmax = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        resid = std::max(resid, std::abs(y[i] - pp.radius * x[i]));
        xmax = std::max(xmax, x[i]);
      }
      if (resid <= std::max(opts.vector_tol * (1.0 + pp.radius) * xmax, tol * xmax)) return true;
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        y[i] += shift * x[i];
        s += y[i];
      }
      if (s == 0.0) return false;
      for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / s;
    }
    return false;
  };

  const bool r_ok = iterate(m, pp.right, pp.iterations);
  const bool l_ok = iterate(m.transposed(), pp.left, pp.iterations);
  const double wu = dot(pp.left, pp.right);
  if (wu > 0.0)
    for (double& v : pp.left) v /= wu;
  pp.converged = r_ok && l_ok && wu > 0.0;
  return pp;
}

// Gradient of R_e with respect to eta:
//   dR_e/d eta_j = w^T (dM/d eta_j) u / (w^T u),
// where dM/d eta_j keeps only column j of k mu. Returns nullopt when the
// Perron root is not simple (several blocks of the effective kernel attain
// the maximal radius within relative gap 1e-8) or is zero.
inline std::optional<Vector> r_gradient(const Kernel& ker, const Strategy& eta, const SpectralOptions& opts = {}) {
  const Matrix m = operator_matrix(ker, eta);
  const Matrix kmu = weighted_matrix(ker);
  const detail::BlockStructure bs = detail::block_structure(m, opts);
  const double rho = bs.max_radius();
  if (rho <= 0.0) return std::nullopt;
  std::size_t top = 0, count = 0;
  for (std::size_t b = 0; b < bs.radii.size(); ++b)
    if (bs.radii[b] >= rho * (1.0 - 1e-8)) {
      ++count;
      top = b;
    }
  if (count != 1) return std::nullopt;
  return detail::branch_gradient(kmu, m, bs, top, true, opts);
}

}  // namespace refrontier
