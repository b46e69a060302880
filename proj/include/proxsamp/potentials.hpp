#pragma once

// Domain types shared by all samplers: the smooth part f (gradient access),
// the oracle part g (prox + RGO access), their composite, and chain traces.
// All types are immutable after construction except ChainTrace.

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "proxsamp/rgo.hpp"

namespace proxsamp {

// f: convex, beta-smooth, with explicit gradient. alpha_f may be negative.
struct SmoothPotential {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  double beta = 0.0;
  double alpha_f = 0.0;
  int dim = 0;

  bool is_zero() const { return beta == 0.0 && alpha_f == 0.0; }
};

inline SmoothPotential zero_smooth(int dim) {
  SmoothPotential f;
  f.value = [](const Vector&) { return 0.0; };
  f.gradient = [dim](const Vector&) { return Vector::Zero(dim).eval(); };
  f.beta = 0.0;
  f.alpha_f = 0.0;
  f.dim = dim;
  return f;
}

// f(x) = (scale/2) ||x - center||^2
inline SmoothPotential isotropic_quadratic(int dim, double scale = 1.0, Vector center = Vector()) {
  if (center.size() == 0) center = Vector::Zero(dim);
  SmoothPotential f;
  f.value = [scale, center](const Vector& x) { return 0.5 * scale * (x - center).squaredNorm(); };
  f.gradient = [scale, center](const Vector& x) { return (scale * (x - center)).eval(); };
  f.beta = scale;
  f.alpha_f = scale;
  f.dim = dim;
  return f;
}

// g: convex, possibly extended-real valued, with prox and RGO access.
struct OracleConvexPotential {
  std::function<double(const Vector&)> value;                 // may return +inf
  std::function<Vector(double, const Vector&)> prox;          // (h, v) -> argmin g + ||.-v||^2/(2h)
  RgoSampler rgo;
  double alpha_g = 0.0;
};

inline OracleConvexPotential zero_oracle() {
  OracleConvexPotential g;
  g.value = [](const Vector&) { return 0.0; };
  g.prox = [](double, const Vector& v) { return v; };
  g.rgo = rgo_gaussian();
  return g;
}

inline OracleConvexPotential l1_oracle(double lambda) {
  OracleConvexPotential g;
  g.value = [lambda](const Vector& x) { return lambda * x.lpNorm<1>(); };
  g.prox = [lambda](double h, const Vector& v) { return prox_l1(lambda, h, v); };
  g.rgo = rgo_l1(lambda);
  return g;
}

inline OracleConvexPotential box_oracle(const Vector& lo, const Vector& hi) {
  OracleConvexPotential g;
  RgoSampler rgo = rgo_box(lo, hi);
  g.value = [rgo](const Vector& x) { return rgo.g_value(x); };
  g.prox = [lo, hi](double, const Vector& v) { return prox_box(lo, hi, v); };
  g.rgo = std::move(rgo);
  return g;
}

// g'(x) = g(x) + <w, x>: used to recenter the pair so the minimizer of f+g
// becomes the shared minimizer of both parts. The prox absorbs the linear
// term through its center; the RGO through the tilt combinator.
inline OracleConvexPotential tilt_oracle(OracleConvexPotential base, const Vector& w) {
  OracleConvexPotential g;
  auto base_value = base.value;
  auto base_prox = base.prox;
  g.value = [base_value, w](const Vector& x) {
    const double gv = base_value(x);
    return gv == kInf ? kInf : gv + w.dot(x);
  };
  g.prox = [base_prox, w](double h, const Vector& v) { return base_prox(h, v - h * w); };
  g.rgo = rgo_shift_tilt(std::move(base.rgo), Vector::Zero(w.size()), 0.0, w, 0.0);
  g.alpha_g = base.alpha_g;
  return g;
}

// The target pi ∝ exp(-f - g), recentered so that x_star is the shared
// minimizer of both parts.
struct CompositeTarget {
  SmoothPotential f;
  OracleConvexPotential g;
  Vector x_star;
  double alpha = 0.0;      // alpha_f + alpha_g, must be positive
  double kappa = 1.0;      // max(1, beta / alpha)
  double minimizer_residual = 0.0;

  int dim() const { return f.dim; }
  double f_value(const Vector& x) const { return f.value(x); }
  double g_value(const Vector& x) const { return g.value(x); }
  double potential(const Vector& x) const {
    const double gv = g.value(x);
    return gv == kInf ? kInf : f.value(x) + gv;
  }
};

// Iterates plus the Appendix-style cost accounting: cumulative gradient
// evaluations per iterate and per-outer-iteration inner acceptance tallies.
struct ChainTrace {
  std::vector<Vector> iterates;
  std::vector<std::int64_t> grad_evals;
  std::vector<int> accept_counts;
  std::uint64_t seed = 0;

  void reserve(std::size_t n) {
    iterates.reserve(n + 1);
    grad_evals.reserve(n + 1);
    accept_counts.reserve(n);
  }
};

}  // namespace proxsamp
