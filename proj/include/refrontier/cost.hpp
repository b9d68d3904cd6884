#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "refrontier/decomposition.hpp"
#include "refrontier/error.hpp"
#include "refrontier/kernel.hpp"
#include "refrontier/matrix.hpp"

namespace refrontier {

enum class CostKind { uniform, affine, custom };

// Decreasing cost of a strategy with C(1) = 0. Uniform and affine costs are
// C(eta) = sum_i (1 - eta_i) c_i mu_i; a custom cost is an opaque callback
// that can be evaluated but not optimised over.
class CostModel {
 public:
  static CostModel uniform(const Population& pop) {
    return CostModel(CostKind::uniform, pop.mu(), Vector(pop.size(), 1.0), {});
  }

  static CostModel affine(const Population& pop, Vector weights) {
    detail::require_size(weights.size(), pop.size(), "affine cost");
    for (double w : weights)
      if (!std::isfinite(w) || w <= 0.0) throw InputError("cost weights must be finite and positive");
    return CostModel(CostKind::affine, pop.mu(), std::move(weights), {});
  }

  static CostModel custom(const Population& pop, std::function<double(const Strategy&)> fn) {
    if (!fn) throw InputError("custom cost needs a callback");
    return CostModel(CostKind::custom, pop.mu(), Vector(pop.size(), 1.0), std::move(fn));
  }

  CostKind kind() const noexcept { return kind_; }
  bool is_affine() const noexcept { return kind_ != CostKind::custom; }
  std::size_t size() const noexcept { return mu_.size(); }
  const Vector& weights() const noexcept { return weights_; }
  const Vector& mu() const noexcept { return mu_; }
  // a_i = c_i mu_i, the cost of fully vaccinating trait i.
  const Vector& masses() const noexcept { return masses_; }
  double c_max() const noexcept { return c_max_; }

  double evaluate(const Strategy& eta) const {
    detail::require_size(eta.size(), size(), "cost evaluate");
    if (kind_ == CostKind::custom) return fn_(eta);
    // long double keeps sums like 6 * (1/12) on the correctly rounded side
    long double s = 0.0L;
    for (std::size_t i = 0; i < size(); ++i) s += (1.0L - eta[i]) * masses_[i];
    return static_cast<double>(s);
  }

  // Intrinsic cost on a subset of traits.
  CostModel restrict(const IndexSet& idx) const {
    if (kind_ == CostKind::custom) throw PreconditionError("custom costs cannot be restricted");
    Vector mu(idx.size()), w(idx.size());
    for (std::size_t p = 0; p < idx.size(); ++p) {
      if (idx[p] >= size()) throw InputError("trait index out of range");
      mu[p] = mu_[idx[p]];
      w[p] = weights_[idx[p]];
    }
    return CostModel(kind_, std::move(mu), std::move(w), {});
  }

 private:
  CostModel(CostKind kind, Vector mu, Vector weights, std::function<double(const Strategy&)> fn)
      : kind_(kind), mu_(std::move(mu)), weights_(std::move(weights)), fn_(std::move(fn)) {
    masses_.resize(mu_.size());
    for (std::size_t i = 0; i < mu_.size(); ++i) masses_[i] = weights_[i] * mu_[i];
    if (kind_ == CostKind::custom) {
      c_max_ = fn_(Strategy::zeros(mu_.size()));
    } else {
      long double s = 0.0L;
      for (double a : masses_) s += a;
      c_max_ = static_cast<double>(s);
    }
  }

  CostKind kind_;
  Vector mu_;
  Vector weights_;
  Vector masses_;
  double c_max_ = 0.0;
  std::function<double(const Strategy&)> fn_;
};

inline double evaluate(const CostModel& cm, const Strategy& eta) { return cm.evaluate(eta); }

struct CostParts {
  Vector atoms;
  double remainder = 0.0;

  double total() const noexcept {
    double s = remainder;
    for (double v : atoms) s += v;
    return s;
  }
};

// Per-atom intrinsic costs plus the cost spent on the remainder.
inline CostParts decompose_cost(const CostModel& cm, const Strategy& eta, const AtomDecomposition& dec) {
  if (!cm.is_affine()) throw PreconditionError("cost decomposition needs an extensive (affine) cost");
  detail::require_size(eta.size(), cm.size(), "decompose_cost");
  CostParts parts;
  const Vector& a = cm.masses();
  for (const IndexSet& atom : dec.atoms) {
    double s = 0.0;
    for (std::size_t i : atom) s += (1.0 - eta[i]) * a[i];
    parts.atoms.push_back(s);
  }
  for (std::size_t i : dec.remainder) parts.remainder += (1.0 - eta[i]) * a[i];
  return parts;
}

// C(eta1 ^ eta2) == C(eta1) + C(eta2) for strategies with disjoint targets
// (eta1 v eta2 = 1).
inline bool is_extensive_pair(const CostModel& cm, const Strategy& eta1, const Strategy& eta2) {
  detail::require_size(eta1.size(), cm.size(), "is_extensive_pair");
  detail::require_size(eta2.size(), cm.size(), "is_extensive_pair");
  Vector meet(cm.size());
  for (std::size_t i = 0; i < cm.size(); ++i) {
    if (std::max(eta1[i], eta2[i]) != 1.0) throw NotDisjointError("vaccination targets overlap");
    meet[i] = std::min(eta1[i], eta2[i]);
  }
  const double lhs = cm.evaluate(Strategy(std::move(meet)));
  const double rhs = cm.evaluate(eta1) + cm.evaluate(eta2);
  return std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(cm.c_max()));
}

}  // namespace refrontier
