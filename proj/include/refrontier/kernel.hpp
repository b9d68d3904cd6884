#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "refrontier/error.hpp"
#include "refrontier/matrix.hpp"

namespace refrontier {

// Finite trait space {0..n-1} with positive measure weights.
class Population {
 public:
  explicit Population(Vector mu) : mu_(std::move(mu)) {
    if (mu_.empty()) throw InputError("population needs at least one trait");
    for (double m : mu_)
      if (!std::isfinite(m) || m <= 0.0) throw InputError("trait weights must be finite and positive");
    total_ = std::accumulate(mu_.begin(), mu_.end(), 0.0);
    if (!std::isfinite(total_)) throw InputError("total mass must be finite");
  }

  static Population counting(std::size_t n) { return Population(Vector(n, 1.0)); }
  static Population probability(std::size_t n) {
    return Population(Vector(n, 1.0 / static_cast<double>(n)));
  }

  std::size_t size() const noexcept { return mu_.size(); }
  const Vector& mu() const noexcept { return mu_; }
  double mu(std::size_t i) const noexcept { return mu_[i]; }
  double total_mass() const noexcept { return total_; }

  friend bool operator==(const Population&, const Population&) = default;

 private:
  Vector mu_;
  double total_ = 0.0;
};

// Vaccination strategy: fraction of NON-vaccinated individuals per trait.
class Strategy {
 public:
  explicit Strategy(Vector eta) : eta_(std::move(eta)) {
    for (double v : eta_)
      if (!(v >= 0.0 && v <= 1.0)) throw InputError("strategy entries must lie in [0,1]");
  }

  static Strategy ones(std::size_t n) { return Strategy(Vector(n, 1.0)); }
  static Strategy zeros(std::size_t n) { return Strategy(Vector(n, 0.0)); }
  static Strategy constant(std::size_t n, double level) { return Strategy(Vector(n, level)); }
  static Strategy indicator(std::size_t n, std::span<const std::size_t> set) {
    Vector v(n, 0.0);
    for (std::size_t i : set) {
      if (i >= n) throw InputError("indicator index out of range");
      v[i] = 1.0;
    }
    return Strategy(std::move(v));
  }

  std::size_t size() const noexcept { return eta_.size(); }
  double operator[](std::size_t i) const noexcept { return eta_[i]; }
  const Vector& values() const noexcept { return eta_; }

  bool is_zero() const noexcept {
    for (double v : eta_)
      if (v != 0.0) return false;
    return true;
  }

  friend bool operator==(const Strategy&, const Strategy&) = default;

 private:
  Vector eta_;
};

// Nonnegative kernel k on a population; k(i,j) is the infection strength
// from trait j toward trait i.
class Kernel {
 public:
  Kernel(Population pop, Matrix k) : pop_(std::move(pop)), k_(std::move(k)) {
    if (!k_.square() || k_.rows() != pop_.size()) throw InputError("kernel dimensions do not match population");
    for (double v : k_.data())
      if (!std::isfinite(v) || v < 0.0) throw InputError("kernel entries must be finite and nonnegative");
  }

  std::size_t size() const noexcept { return pop_.size(); }
  const Population& population() const noexcept { return pop_; }
  const Vector& mu() const noexcept { return pop_.mu(); }
  double mu(std::size_t i) const noexcept { return pop_.mu(i); }
  const Matrix& matrix() const noexcept { return k_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return k_(i, j); }

  friend bool operator==(const Kernel&, const Kernel&) = default;

 private:
  Population pop_;
  Matrix k_;
};

namespace detail {

inline void require_size(std::size_t got, std::size_t want, const char* what) {
  if (got != want) throw InputError(std::string(what) + ": dimension mismatch");
}

}  // namespace detail

// Kernel of a metapopulation model with next-generation matrix K:
// k(i,j) = K(i,j) / mu(j).
inline Kernel from_metapopulation(const Matrix& next_generation, const Vector& mu) {
  if (!next_generation.square()) throw InputError("next-generation matrix must be square");
  detail::require_size(mu.size(), next_generation.rows(), "from_metapopulation");
  Population pop(mu);
  const std::size_t n = mu.size();
  Matrix k(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double v = next_generation(i, j);
      if (!std::isfinite(v) || v < 0.0) throw InputError("next-generation matrix must be nonnegative");
      k(i, j) = v / mu[j];
    }
  return Kernel(std::move(pop), std::move(k));
}

// Kernel k = transmission / gamma (column-wise) for SIS/SEIR-type models.
inline Kernel from_rates(const Matrix& transmission, const Vector& gamma, const Vector& mu) {
  if (!transmission.square()) throw InputError("transmission matrix must be square");
  detail::require_size(gamma.size(), transmission.rows(), "from_rates");
  for (double g : gamma)
    if (!std::isfinite(g) || g <= 0.0) throw InputError("recovery rates must be positive");
  const std::size_t n = gamma.size();
  Matrix k(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) k(i, j) = transmission(i, j) / gamma[j];
  return Kernel(Population(mu), std::move(k));
}

inline Kernel from_rates(const Matrix& transmission, const Vector& gamma) {
  return from_rates(transmission, gamma, Vector(gamma.size(), 1.0));
}

// (f k g)(i,j) = f(i) k(i,j) g(j).
inline Kernel scale(std::span<const double> f, const Kernel& ker, std::span<const double> g) {
  const std::size_t n = ker.size();
  detail::require_size(f.size(), n, "scale");
  detail::require_size(g.size(), n, "scale");
  for (std::size_t i = 0; i < n; ++i)
    if (!(f[i] >= 0.0) || !(g[i] >= 0.0)) throw InputError("scaling vectors must be nonnegative");
  Matrix k(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) k(i, j) = f[i] * ker(i, j) * g[j];
  return Kernel(ker.population(), std::move(k));
}

// Effective kernel k * eta (right scaling).
inline Kernel effective_kernel(const Kernel& ker, const Strategy& eta) {
  const Vector ones(ker.size(), 1.0);
  return scale(ones, ker, eta.values());
}

// Mixed L^p(L^q) norm of the kernel, q = p/(p-1).
inline double double_norm(const Kernel& ker, double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw PreconditionError("double_norm requires p in (1, inf)");
  const double q = p / (p - 1.0);
  const auto& mu = ker.mu();
  double outer = 0.0;
  for (std::size_t i = 0; i < ker.size(); ++i) {
    double inner = 0.0;
    for (std::size_t j = 0; j < ker.size(); ++j) inner += std::pow(ker(i, j), q) * mu[j];
    outer += mu[i] * std::pow(inner, p / q);
  }
  return std::pow(outer, 1.0 / p);
}

// M(i,j) = k(i,j) mu(j): the quadrature-weighted operator without vaccination.
inline Matrix weighted_matrix(const Kernel& ker) {
  const std::size_t n = ker.size();
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = ker(i, j) * ker.mu()[j];
  return m;
}

// M(i,j) = k(i,j) mu(j) eta(j): the matrix of the effective operator.
inline Matrix operator_matrix(const Kernel& ker, const Strategy& eta) {
  detail::require_size(eta.size(), ker.size(), "operator_matrix");
  const std::size_t n = ker.size();
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = ker(i, j) * ker.mu()[j] * eta[j];
  return m;
}

// Adjacency matrix of the non-oriented cycle graph on n nodes.
inline Matrix cycle_adjacency(std::size_t n) {
  if (n < 3) throw InputError("cycle graph needs at least 3 nodes");
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    a(i, (i + 1) % n) = 1.0;
    a((i + 1) % n, i) = 1.0;
  }
  return a;
}

// Cycle graph as a metapopulation model with equal subpopulation sizes
// (probability measure), so R_0 = 2.
inline Kernel cycle_kernel(std::size_t n) {
  return from_metapopulation(cycle_adjacency(n), Vector(n, 1.0 / static_cast<double>(n)));
}

// Midpoint-rule discretization of a kernel on [0,1]^2 with n equal cells.
inline Kernel discretize_unit_square(const std::function<double(double, double)>& kernel, std::size_t n) {
  if (n == 0) throw InputError("discretization needs at least one cell");
  const double h = 1.0 / static_cast<double>(n);
  Matrix k(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      k(i, j) = kernel((static_cast<double>(i) + 0.5) * h, (static_cast<double>(j) + 0.5) * h);
  return Kernel(Population(Vector(n, h)), std::move(k));
}

}  // namespace refrontier
