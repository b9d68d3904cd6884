#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string_view>
#include <vector>

#include "refrontier/decomposition.hpp"
#include "refrontier/error.hpp"
#include "refrontier/kernel.hpp"
#include "refrontier/matrix.hpp"
#include "refrontier/spectral.hpp"

namespace refrontier {

struct SisState {
  double t = 0.0;
  Vector infected;
};

struct SisTrajectory {
  std::vector<SisState> states;
  std::size_t clamp_count = 0;
};

struct SisOptions {
  double t_end = 200.0;
  double dt = 0.01;
  std::size_t record_every = 100;  // steps between recorded states
};

// RK4 for dI_i/dt = (eta_i - I_i) sum_j beta_ij I_j mu_j - gamma_i I_i; the
// vaccinated share 1 - eta_i never becomes infected. After each step I is
// clamped to [0, eta]; every clamped entry is counted.
inline SisTrajectory simulate_sis(const Matrix& transmission, const Vector& gamma, const Vector& mu,
                                  const Strategy& eta, const Vector& i0, const SisOptions& opts = {}) {
  const std::size_t n = gamma.size();
  if (!transmission.square() || transmission.rows() != n) throw InputError("transmission matrix size mismatch");
  detail::require_size(mu.size(), n, "simulate_sis");
  detail::require_size(eta.size(), n, "simulate_sis");
  detail::require_size(i0.size(), n, "simulate_sis");
  for (double v : transmission.data())
    if (!std::isfinite(v) || v < 0.0) throw InputError("transmission must be finite and nonnegative");
  for (double g : gamma)
    if (!std::isfinite(g) || g <= 0.0) throw InputError("recovery rates must be positive");
  for (double m : mu)
    if (!std::isfinite(m) || m <= 0.0) throw InputError("trait weights must be positive");
  for (std::size_t i = 0; i < n; ++i)
    if (!(i0[i] >= 0.0 && i0[i] <= eta[i])) throw InputError("initial infection must lie in [0, eta]");
  if (!(opts.dt > 0.0) || !std::isfinite(opts.dt)) throw InputError("time step must be positive");
  if (!(opts.t_end >= 0.0) || !std::isfinite(opts.t_end)) throw InputError("horizon must be nonnegative");

  Matrix bmu(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) bmu(i, j) = transmission(i, j) * mu[j];

  auto rhs = [&](const Vector& x, Vector& out) {
    for (std::size_t i = 0; i < n; ++i) {
      double force = 0.0;
      const auto r = bmu.row(i);
      for (std::size_t j = 0; j < n; ++j) force += r[j] * x[j];
      out[i] = (eta[i] - x[i]) * force - gamma[i] * x[i];
    }
  };

  const std::size_t steps = opts.t_end == 0.0 ? 0 : static_cast<std::size_t>(std::ceil(opts.t_end / opts.dt - 1e-9));
  const double h = steps == 0 ? 0.0 : opts.t_end / static_cast<double>(steps);
  const std::size_t every = std::max<std::size_t>(opts.record_every, 1);

  SisTrajectory traj;
  Vector x = i0, k1(n), k2(n), k3(n), k4(n), tmp(n);
  traj.states.push_back({0.0, x});
  for (std::size_t s = 1; s <= steps; ++s) {
    rhs(x, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
    rhs(tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
    rhs(tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
    rhs(tmp, k4);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      if (x[i] < 0.0 || x[i] > eta[i]) {
        x[i] = std::clamp(x[i], 0.0, eta[i]);
        ++traj.clamp_count;
      }
    }
    if (s % every == 0 || s == steps) traj.states.push_back({h * static_cast<double>(s), x});
  }
  return traj;
}

enum class Threshold { subcritical_extinct, supercritical_endemic, inconclusive };

inline std::string_view to_string(Threshold t) {
  switch (t) {
    case Threshold::subcritical_extinct: return "subcritical-extinct";
    case Threshold::supercritical_endemic: return "supercritical-endemic";
    case Threshold::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

struct ThresholdResult {
  Threshold verdict = Threshold::inconclusive;
  double r_e = 0.0;
  double terminal_max = 0.0;   // max_i I_i(t_end)
  double terminal_mass = 0.0;  // mu-weighted mean of I(t_end)
  double drift = 0.0;          // max deviation from I(t_end) over the last 10% of the horizon
  std::size_t clamp_count = 0;
};

// Finite-horizon proxy for the threshold theorem: extinct when every I_i(t_end)
// is below 1e-6; endemic when the mean infection exceeds 1e-3, the state has
// settled within 1e-6 over the final tenth of the run and the kernel restricted
// to {eta > 0} is irreducible. Otherwise inconclusive. i0 defaults to 0.01 eta.
inline ThresholdResult threshold_check(const Matrix& transmission, const Vector& gamma, const Vector& mu,
                                       const Strategy& eta, double t_end = 200.0, double dt = 0.01,
                                       Vector i0 = {}) {
  const std::size_t n = gamma.size();
  if (i0.empty()) {
    i0.resize(eta.size());
    for (std::size_t i = 0; i < eta.size(); ++i) i0[i] = 0.01 * eta[i];
  }
  SisOptions o;
  o.t_end = t_end;
  o.dt = dt;
  o.record_every = 1;
  const SisTrajectory traj = simulate_sis(transmission, gamma, mu, eta, i0, o);
  const Kernel ker = from_rates(transmission, gamma, mu);

  ThresholdResult res;
  res.clamp_count = traj.clamp_count;
  res.r_e = effective_r(ker, eta);
  const Vector& last = traj.states.back().infected;
  double mass = 0.0, total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    res.terminal_max = std::max(res.terminal_max, last[i]);
    mass += mu[i] * last[i];
    total += mu[i];
  }
  res.terminal_mass = mass / total;
  const double t_from = 0.9 * t_end;
  for (const SisState& s : traj.states) {
    if (s.t < t_from) continue;
    for (std::size_t i = 0; i < n; ++i) res.drift = std::max(res.drift, std::abs(s.infected[i] - last[i]));
  }

  if (res.terminal_max < 1e-6) {
    res.verdict = Threshold::subcritical_extinct;
    return res;
  }
  if (res.terminal_mass > 1e-3 && res.drift <= 1e-6) {
    IndexSet pos;
    for (std::size_t i = 0; i < n; ++i)
      if (eta[i] > 0.0) pos.push_back(i);
    if (!pos.empty() && decompose(restrict(ker, pos)).classification == Classification::irreducible)
      res.verdict = Threshold::supercritical_endemic;
  }
  return res;
}

}  // namespace refrontier
