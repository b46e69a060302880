#pragma once

// Baselines for head-to-head comparisons: the proximal gradient Langevin
// algorithm (one gradient per iteration, asymptotically biased) and
// Prox-MALA (Metropolis-corrected, two gradients per iteration).

#include <cmath>

#include "proxsamp/potentials.hpp"

namespace proxsamp {

// x+ = prox_{hg}(x - h grad f(x) + N(0, 2h I))
inline Vector pgla_step(const CompositeTarget& target, double h, const Vector& x, Rng& rng) {
  if (!(h > 0.0)) throw std::invalid_argument("pgla_step: h must be positive");
  const Vector drift = x - h * target.f.gradient(x);
  return target.g.prox(h, drift + std::sqrt(2.0 * h) * rng.normal_vector(x.size()));
}

struct ProxMalaStep {
  Vector state;
  bool accepted = false;
  bool proposal_feasible = true;
};

// Metropolis-Hastings with proposal Q(x, .) = N(prox_{hg}(x - h grad f(x)), 2h I).
// Infeasible proposals (g = +inf) are rejected outright.
inline ProxMalaStep prox_mala_step(const CompositeTarget& target, double h, const Vector& x, Rng& rng) {
  if (!(h > 0.0)) throw std::invalid_argument("prox_mala_step: h must be positive");
  const Vector mean_x = target.g.prox(h, x - h * target.f.gradient(x));
  const Vector y = mean_x + std::sqrt(2.0 * h) * rng.normal_vector(x.size());

  const double g_y = target.g.value(y);
  if (g_y == kInf) return {x, false, false};

  const Vector mean_y = target.g.prox(h, y - h * target.f.gradient(y));
  const double log_fwd = -(y - mean_x).squaredNorm() / (4.0 * h);
  const double log_bwd = -(x - mean_y).squaredNorm() / (4.0 * h);
  const double log_r = -(target.f.value(y) + g_y) + target.potential(x) + log_bwd - log_fwd;

  if (log_r >= 0.0 || std::log(rng.uniform()) <= log_r) return {y, true, true};
  return {x, false, true};
}

}  // namespace proxsamp
