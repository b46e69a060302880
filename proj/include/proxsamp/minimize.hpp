#pragma once

// Proximal gradient minimization of f + g. Supplies the shared minimizer
// x_star that the composite sampler assumes access to.

#include <cmath>
#include <stdexcept>
#include <string>

#include "proxsamp/potentials.hpp"

namespace proxsamp {

struct MinimizeError : std::runtime_error {
  Vector last_iterate;
  double residual;
  MinimizeError(Vector last, double res)
      : std::runtime_error("find_minimizer: no convergence within max_iters (residual " + std::to_string(res) + ")"),
        last_iterate(std::move(last)),
        residual(res) {}
};

struct MinimizeResult {
  Vector x;
  double residual = 0.0;  // ||x - prox(1/beta, x - grad f(x)/beta)||
  int iterations = 0;
};

// Fixed-point residual of the proximal gradient map at step size `step`.
inline double prox_gradient_residual(const SmoothPotential& f, const OracleConvexPotential& g, const Vector& x,
                                     double step) {
  return (x - g.prox(step, x - step * f.gradient(x))).norm();
}

inline MinimizeResult find_minimizer(const SmoothPotential& f, const OracleConvexPotential& g, double tol = 1e-8,
                                     int max_iters = 2'000'000, Vector start = Vector()) {
  if (!(tol > 0.0)) throw std::invalid_argument("find_minimizer: tol must be positive");
  const double step = f.beta > 0.0 ? 1.0 / f.beta : 1.0;
  Vector x = start.size() ? std::move(start) : Vector::Zero(f.dim);
  for (int it = 0; it < max_iters; ++it) {
    Vector next = g.prox(step, x - step * f.gradient(x));
    const double moved = (x - next).norm();
    x = std::move(next);
    if (moved <= tol) {
      const double residual = prox_gradient_residual(f, g, x, step);
      return {std::move(x), residual, it + 1};
    }
  }
  throw MinimizeError(x, prox_gradient_residual(f, g, x, step));
}

// Assembles the composite target: computes x_star when absent, then
// recenters the pair (f - <w, .>, g + <w, .>) with w = grad f(x_star) so
// that x_star minimizes both parts. The sum f + g is unchanged.
inline CompositeTarget make_composite_target(SmoothPotential f, OracleConvexPotential g, Vector x_star = Vector(),
                                             double minimizer_tol = 1e-8, int max_iters = 2'000'000) {
  CompositeTarget target;
  double residual = 0.0;
  if (x_star.size() == 0) {
    MinimizeResult res = find_minimizer(f, g, minimizer_tol, max_iters);
    x_star = std::move(res.x);
    residual = res.residual;
  } else {
    residual = prox_gradient_residual(f, g, x_star, f.beta > 0.0 ? 1.0 / f.beta : 1.0);
  }

  const Vector w = f.gradient(x_star);
  if (w.norm() > 0.0) {
    SmoothPotential f_shift = f;
    auto value = f.value;
    auto gradient = f.gradient;
    f_shift.value = [value, w](const Vector& x) { return value(x) - w.dot(x); };
    f_shift.gradient = [gradient, w](const Vector& x) { return (gradient(x) - w).eval(); };
    target.f = std::move(f_shift);
    target.g = tilt_oracle(std::move(g), w);
  } else {
    target.f = std::move(f);
    target.g = std::move(g);
  }

  target.alpha = target.f.alpha_f + target.g.alpha_g;
  if (!(target.alpha > 0.0)) throw std::invalid_argument("make_composite_target: alpha_f + alpha_g must be positive");
  target.kappa = std::max(1.0, target.f.beta / target.alpha);
  target.x_star = std::move(x_star);
  target.minimizer_residual = residual;
  return target;
}

}  // namespace proxsamp
