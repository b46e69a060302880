#pragma once

// Restricted Gaussian oracles: exact samplers for densities proportional to
//   exp(-g(x) - ||x - v||^2 / (2h)),
// the sampling analogue of the proximal map of g. Concrete oracles are
// provided for boxes, l1 and linf penalties, quadratics and rank-one affine
// compositions, together with shift/tilt and separable-product combinators.

#include <algorithm>
#include <functional>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "proxsamp/math.hpp"
#include "proxsamp/rng.hpp"
#include "proxsamp/truncated_gaussian.hpp"

namespace proxsamp {

// Exact sampler for exp(-g(x) - ||x-v||^2/(2h)). Immutable and shareable;
// draws take an external rng stream, so concurrent draws with distinct
// streams are safe.
class RgoSampler {
 public:
  using GValue = std::function<double(const Vector&)>;
  using Draw = std::function<Vector(double h, const Vector& v, Rng&)>;

  RgoSampler() = default;
  RgoSampler(GValue g, Draw draw) : g_(std::move(g)), draw_(std::move(draw)) {}

  Vector draw(double h, const Vector& v, Rng& rng) const {
    if (!(h > 0.0)) throw std::invalid_argument("RgoSampler::draw: step h must be positive");
    return draw_(h, v, rng);
  }

  double g_value(const Vector& x) const { return g_(x); }

  // -g(x) - ||x - v||^2/(2h); -inf outside dom g
  double log_density_unnormalized(double h, const Vector& v, const Vector& x) const {
    const double gx = g_(x);
    if (gx == kInf) return -kInf;
    return -gx - (x - v).squaredNorm() / (2.0 * h);
  }

  explicit operator bool() const { return static_cast<bool>(draw_); }

 private:
  GValue g_;
  Draw draw_;
};

// ---------------------------------------------------------------------------
// Proximal operators

inline double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

inline Vector prox_l1(double lambda, double h, const Vector& v) {
  if (lambda < 0.0) throw std::invalid_argument("prox_l1: lambda must be nonnegative");
  return v.unaryExpr([t = lambda * h](double x) { return soft_threshold(x, t); });
}

inline Vector prox_box(const Vector& lo, const Vector& hi, const Vector& v) {
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!(lo[i] < hi[i])) throw std::invalid_argument("prox_box: lo >= hi");
    out[i] = std::clamp(v[i], lo[i], hi[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Concrete oracles

// g = 0: the RGO is just N(v, h I).
inline RgoSampler rgo_gaussian() {
  return RgoSampler([](const Vector&) { return 0.0; },
                    [](double h, const Vector& v, Rng& rng) -> Vector {
                      return v + std::sqrt(h) * rng.normal_vector(v.size());
                    });
}

// g = indicator of the box [lo, hi]: coordinatewise truncated Gaussians.
inline RgoSampler rgo_box(const Vector& lo, const Vector& hi) {
  for (Eigen::Index i = 0; i < lo.size(); ++i)
    if (!(lo[i] < hi[i])) throw std::invalid_argument("rgo_box: lo >= hi");
  auto g = [lo, hi](const Vector& x) -> double {
    for (Eigen::Index i = 0; i < x.size(); ++i)
      if (x[i] < lo[i] || x[i] > hi[i]) return kInf;
    return 0.0;
  };
  auto draw = [lo, hi](double h, const Vector& v, Rng& rng) -> Vector {
    Vector x(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) x[i] = truncated_gaussian_1d(v[i], h, lo[i], hi[i], rng);
    return x;
  };
  return RgoSampler(std::move(g), std::move(draw));
}

namespace detail {

// One coordinate of the l1 oracle: pick the sign branch by its exact mass,
// then draw the corresponding half-line truncated Gaussian. The branch
// weights
//   w- = exp(lambda v + lambda^2 h / 2) Phi(-(v + lambda h)/sqrt(h))
//   w+ = exp(-lambda v + lambda^2 h / 2) Phi((v - lambda h)/sqrt(h))
// are formed in log space; the exp prefactors overflow long before the
// probabilities degenerate.
inline double l1_coordinate_draw(double lambda, double h, double v, Rng& rng) {
  if (lambda == 0.0) return v + std::sqrt(h) * rng.normal();
  const double sqrt_h = std::sqrt(h);
  const double log_wm = lambda * v + log_normal_cdf(-(v + lambda * h) / sqrt_h);
  const double log_wp = -lambda * v + log_normal_cdf((v - lambda * h) / sqrt_h);
  const double p_minus = sigmoid(log_wm - log_wp);
  if (rng.uniform() < p_minus) return truncated_gaussian_1d(v + lambda * h, h, -kInf, 0.0, rng);
  return truncated_gaussian_1d(v - lambda * h, h, 0.0, kInf, rng);
}

}  // namespace detail

// g = lambda ||x||_1, sampled exactly per coordinate via the two-sided
// Gaussian mixture.
inline RgoSampler rgo_l1(double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("rgo_l1: lambda must be nonnegative");
  auto g = [lambda](const Vector& x) { return lambda * x.lpNorm<1>(); };
  auto draw = [lambda](double h, const Vector& v, Rng& rng) -> Vector {
    Vector x(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) x[i] = detail::l1_coordinate_draw(lambda, h, v[i], rng);
    return x;
  };
  return RgoSampler(std::move(g), std::move(draw));
}

// Blockwise product of independent oracles. The blocks must partition the
// coordinates 0..dim-1.
inline RgoSampler rgo_separable_product(std::vector<std::pair<RgoSampler, std::vector<int>>> parts, int dim) {
  std::vector<int> seen(static_cast<std::size_t>(dim), 0);
  for (const auto& [sampler, block] : parts) {
    (void)sampler;
    for (int i : block) {
      if (i < 0 || i >= dim || seen[static_cast<std::size_t>(i)]++)
        throw std::invalid_argument("rgo_separable_product: blocks must partition the coordinates");
    }
  }
  for (int s : seen)
    if (!s) throw std::invalid_argument("rgo_separable_product: blocks must partition the coordinates");

  auto shared = std::make_shared<const std::vector<std::pair<RgoSampler, std::vector<int>>>>(std::move(parts));
  auto g = [shared](const Vector& x) -> double {
    double total = 0.0;
    for (const auto& [sampler, block] : *shared) {
      Vector sub(block.size());
      for (std::size_t j = 0; j < block.size(); ++j) sub[static_cast<Eigen::Index>(j)] = x[block[j]];
      const double gj = sampler.g_value(sub);
      if (gj == kInf) return kInf;
      total += gj;
    }
    return total;
  };
  auto draw = [shared, dim](double h, const Vector& v, Rng& rng) -> Vector {
    Vector x(dim);
    for (const auto& [sampler, block] : *shared) {
      Vector sub(block.size());
      for (std::size_t j = 0; j < block.size(); ++j) sub[static_cast<Eigen::Index>(j)] = v[block[j]];
      const Vector drawn = sampler.draw(h, sub, rng);
      for (std::size_t j = 0; j < block.size(); ++j) x[block[j]] = drawn[static_cast<Eigen::Index>(j)];
    }
    return x;
  };
  return RgoSampler(std::move(g), std::move(draw));
}

// Shift and quadratic tilt of a base oracle:
//   g(x) = gbase(x - c) + (a/2) ||x - c||^2 + <b, x - c> + offset.
// Draws compose the shift rule RGO_{g,h,v} = c + RGO_{g~,h,v-c} with the
// tilt rule RGO_{g~+tilt,h,w} = RGO_{g~, h/(1+ah), (w - h b)/(1+ah)}.
inline RgoSampler rgo_shift_tilt(RgoSampler base, Vector c, double a, Vector b, double offset = 0.0) {
  auto base_ptr = std::make_shared<const RgoSampler>(std::move(base));
  auto g = [base_ptr, c, a, b, offset](const Vector& x) -> double {
    const Vector u = x - c;
    const double gu = base_ptr->g_value(u);
    if (gu == kInf) return kInf;
    return gu + 0.5 * a * u.squaredNorm() + b.dot(u) + offset;
  };
  auto draw = [base_ptr, c, a, b](double h, const Vector& v, Rng& rng) -> Vector {
    const double denom = 1.0 + a * h;
    if (!(denom > 0.0)) throw std::invalid_argument("rgo_shift_tilt: 1 + a*h must be positive");
    const double h_eff = h / denom;
    const Vector v_eff = ((v - c) - h * b) / denom;
    return c + base_ptr->draw(h_eff, v_eff, rng);
  };
  return RgoSampler(std::move(g), std::move(draw));
}

// g(x) = (1/2) x' A x + <b, x> + offset with A symmetric. The RGO is the
// Gaussian N(A_h (v/h - b), A_h) with A_h^{-1} = A + I/h.
inline RgoSampler rgo_quadratic(Matrix A, Vector b, double offset = 0.0) {
  if (A.rows() != A.cols() || A.rows() != b.size())
    throw std::invalid_argument("rgo_quadratic: dimension mismatch");
  auto g = [A, b, offset](const Vector& x) { return 0.5 * x.dot(A * x) + b.dot(x) + offset; };
  auto draw = [A, b](double h, const Vector& v, Rng& rng) -> Vector {
    Matrix precision = A;
    precision.diagonal().array() += 1.0 / h;
    Eigen::LLT<Matrix> llt(precision);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("rgo_quadratic: A + I/h is not positive definite at this step size");
    const Vector mean = llt.solve(v / h - b);
    // covariance A_h = (L L')^{-1}: apply L'^{-1} to white noise
    return mean + llt.matrixU().solve(rng.normal_vector(b.size()));
  };
  return RgoSampler(std::move(g), std::move(draw));
}

// g(x) = gbar(<b, x>) for a one-dimensional gbar with its own oracle.
// Draw the projection from the 1D RGO at step h ||b||^2 and center <b, v>,
// then fill in the orthogonal complement with N(0, h (I - b b'/||b||^2)).
inline RgoSampler rgo_affine_rank_one(Vector b, RgoSampler gbar_rgo_1d) {
  const double s2 = b.squaredNorm();
  if (!(s2 > 0.0)) throw std::invalid_argument("rgo_affine_rank_one: b must be nonzero");
  auto bar = std::make_shared<const RgoSampler>(std::move(gbar_rgo_1d));
  auto g = [b, bar](const Vector& x) -> double {
    Vector proj(1);
    proj[0] = b.dot(x);
    return bar->g_value(proj);
  };
  auto draw = [b, s2, bar](double h, const Vector& v, Rng& rng) -> Vector {
    Vector center(1);
    center[0] = b.dot(v);
    const double xbar = bar->draw(h * s2, center, rng)[0];
    Vector z = std::sqrt(h) * rng.normal_vector(v.size());
    z -= b * (b.dot(z) / s2);  // project out the b direction
    return v + b * ((xbar - center[0]) / s2) + z;
  };
  return RgoSampler(std::move(g), std::move(draw));
}

// 1D convex indicator of (-inf, c]; handy as the gbar of half-space oracles.
inline RgoSampler rgo_halfline_1d(double c) {
  auto g = [c](const Vector& x) { return x[0] <= c ? 0.0 : kInf; };
  auto draw = [c](double h, const Vector& v, Rng& rng) -> Vector {
    Vector x(1);
    x[0] = truncated_gaussian_1d(v[0], h, -kInf, c, rng);
    return x;
  };
  return RgoSampler(std::move(g), std::move(draw));
}

// ---------------------------------------------------------------------------
// linf penalty

namespace detail {

// Radial density of the linf oracle: p(t) ∝ exp(-lambda t) prod_i m_i(t)
// with m_i(t) = P(|N(v_i, h)| <= t). Tabulated once per (h, v) on a grid
// refined until the truncated tail is below 1e-10 of the captured mass.
struct LinfGrid {
  double lambda = 0.0, h = -1.0;
  Vector v;
  std::vector<double> nodes;   // t_0 = 0 .. t_n = T, uniform
  std::vector<double> density; // normalized so the trapezoid integral is 1
  std::vector<double> cum;     // cumulative trapezoid masses, cum[0] = 0

  bool matches(double lambda_q, double h_q, const Vector& v_q) const {
    return lambda == lambda_q && h == h_q && v.size() == v_q.size() && v == v_q;
  }

  double invert(double u) const {
    const auto it = std::upper_bound(cum.begin(), cum.end(), u);
    std::size_t j = static_cast<std::size_t>(it - cum.begin());
    if (j == 0) return nodes.front();
    if (j >= cum.size()) return nodes.back();
    --j;
    const double dt = nodes[j + 1] - nodes[j];
    const double w0 = density[j], w1 = density[j + 1];
    const double r = u - cum[j];
    // trapezoid segment: r = w0 s + (w1 - w0) s^2 / (2 dt)
    const double slope = (w1 - w0) / dt;
    double s;
    if (std::abs(slope) * dt < 1e-12 * (w0 + 1e-300)) {
      s = r / std::max(w0, 1e-300);
    } else {
      const double disc = w0 * w0 + 2.0 * slope * r;
      s = (std::sqrt(std::max(disc, 0.0)) - w0) / slope;
    }
    return nodes[j] + std::clamp(s, 0.0, dt);
  }
};

inline std::shared_ptr<const LinfGrid> build_linf_grid(double lambda, double h, const Vector& v) {
  const double sqrt_h = std::sqrt(h);
  double upper = 8.0 * std::max(v.lpNorm<Eigen::Infinity>(), sqrt_h);
  std::size_t n = 4096;

  auto log_p = [&](double t) -> double {
    if (t <= 0.0) return -kInf;
    double lp = -lambda * t;
    for (Eigen::Index i = 0; i < v.size(); ++i)
      lp += log_normal_interval_mass((-t - v[i]) / sqrt_h, (t - v[i]) / sqrt_h);
    return lp;
  };

  for (int attempt = 0;; ++attempt) {
    if (attempt > 24 || n > (1u << 22))
      throw QuadratureError("rgo_linf: radial quadrature grid failed to capture the required mass");
    auto grid = std::make_shared<LinfGrid>();
    grid->lambda = lambda;
    grid->h = h;
    grid->v = v;
    grid->nodes.resize(n + 1);
    std::vector<double> logs(n + 1);
    const double dt = upper / static_cast<double>(n);
    double log_max = -kInf;
    for (std::size_t j = 0; j <= n; ++j) {
      grid->nodes[j] = dt * static_cast<double>(j);
      logs[j] = log_p(grid->nodes[j]);
      log_max = std::max(log_max, logs[j]);
    }
    if (log_max == -kInf) {
      upper *= 2.0;
      continue;
    }
    grid->density.resize(n + 1);
    for (std::size_t j = 0; j <= n; ++j) grid->density[j] = std::exp(logs[j] - log_max);
    double total = 0.0;
    grid->cum.assign(n + 1, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      total += 0.5 * (grid->density[j] + grid->density[j + 1]) * dt;
      grid->cum[j + 1] = total;
    }
    // captured mass in absolute log units vs the analytic tail bound
    // integral_T^inf exp(-lambda t) dt, using prod_i m_i <= 1
    const double log_mass = log_max + std::log(total);
    const double log_tail = -lambda * upper - std::log(lambda);
    if (log_tail - log_mass > std::log(1e-10)) {
      upper *= 2.0;
      n *= 2;
      continue;
    }
    for (std::size_t j = 0; j <= n; ++j) {
      grid->density[j] /= total;
      grid->cum[j] /= total;
    }
    grid->cum[n] = 1.0;
    return grid;
  }
}

struct LinfGridCache {
  mutable std::mutex mutex;
  mutable std::shared_ptr<const LinfGrid> slot;

  std::shared_ptr<const LinfGrid> get(double lambda, double h, const Vector& v) const {
    {
      std::lock_guard<std::mutex> lock(mutex);
      if (slot && slot->matches(lambda, h, v)) return slot;
    }
    auto grid = build_linf_grid(lambda, h, v);
    std::lock_guard<std::mutex> lock(mutex);
    slot = grid;
    return grid;
  }
};

}  // namespace detail

// g = lambda ||x||_inf. Two-stage exact sampler: draw the envelope radius t
// from its marginal density by inverse CDF on a quadrature grid, then each
// coordinate from N(v_i, h)|[-t, t].
inline RgoSampler rgo_linf(double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("rgo_linf: lambda must be positive");
  auto cache = std::make_shared<detail::LinfGridCache>();
  auto g = [lambda](const Vector& x) { return lambda * x.lpNorm<Eigen::Infinity>(); };
  auto draw = [lambda, cache](double h, const Vector& v, Rng& rng) -> Vector {
    const auto grid = cache->get(lambda, h, v);
    const double t = grid->invert(rng.uniform());
    Vector x(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i)
      x[i] = (t > 0.0) ? truncated_gaussian_1d(v[i], h, -t, t, rng) : 0.0;
    return x;
  };
  return RgoSampler(std::move(g), std::move(draw));
}

}  // namespace proxsamp
