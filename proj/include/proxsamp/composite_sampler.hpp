#pragma once

// The composite sampler: an outer Gibbs loop alternating a forward Gaussian
// step y = x + sqrt(h) xi with an inner independent Metropolis-Hastings run
// whose proposal is the RGO of g centered at y - h grad f(y). One outer
// iteration is accounted as n_max_inner + 1 gradient evaluations.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "proxsamp/imh.hpp"
#include "proxsamp/potentials.hpp"

namespace proxsamp {

struct SamplerConfig {
  std::optional<double> h;        // empty = auto step size
  std::optional<int> n_outer;     // K; empty = derived from epsilon
  std::optional<int> n_max_inner; // empty = ceil(10 log(1/zeta))
  std::optional<double> zeta;     // inner accuracy; empty = epsilon/(6K)
  double epsilon = 0.01;
  std::uint64_t seed = 0;
};

struct ResolvedConfig {
  double h = 0.0;
  int n_outer = 1;
  int n_max_inner = 1;
  double zeta = 0.0;
  std::uint64_t seed = 0;
};

// h = c / (beta sqrt(d log(2 kappa v 2)) log^2(1/zeta)), capped at 1/(2 beta).
inline double default_step_size(double beta, int dim, double kappa, double zeta, double constant = 1.0) {
  if (!(beta > 0.0) || dim < 1 || !(kappa >= 1.0) || !(zeta > 0.0 && zeta < 1.0))
    throw std::invalid_argument("default_step_size: invalid arguments");
  const double log_term = std::log(std::max(2.0 * kappa, 2.0));
  const double log_zeta = std::log(1.0 / zeta);
  const double h = constant / (beta * std::sqrt(dim * log_term) * log_zeta * log_zeta);
  return std::min(h, 1.0 / (2.0 * beta));
}

// K = ceil((2/(alpha h)) log(d log(2 kappa) / eps^2)), at least 1.
inline int default_outer_iterations(double alpha, double h, int dim, double kappa, double epsilon) {
  const double arg = dim * std::log(std::max(2.0 * kappa, 2.0)) / (epsilon * epsilon);
  const double k = (2.0 / (alpha * h)) * std::log(arg);
  return std::max(1, static_cast<int>(std::ceil(k)));
}

inline int default_inner_cap(double zeta) { return std::max(1, static_cast<int>(std::ceil(10.0 * std::log(1.0 / zeta)))); }

// Resolves the K-zeta circularity with one fixed-point pass: seed zeta with
// epsilon, derive (h, K), recompute zeta = epsilon/(6K), rederive, stop.
inline ResolvedConfig resolve_config(const SamplerConfig& cfg, const CompositeTarget& target) {
  if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) throw std::invalid_argument("resolve_config: epsilon must lie in (0,1)");
  const bool smooth_part = !target.f.is_zero();

  auto step_for = [&](double zeta) -> double {
    if (cfg.h) return *cfg.h;
    if (!smooth_part) return 1.0;  // free choice when f = 0; any h is exact
    return default_step_size(target.f.beta, target.dim(), target.kappa, zeta);
  };
  auto outer_for = [&](double h) -> int {
    if (cfg.n_outer) return *cfg.n_outer;
    return default_outer_iterations(target.alpha, h, target.dim(), target.kappa, cfg.epsilon);
  };

  double zeta = cfg.zeta.value_or(cfg.epsilon);
  double h = step_for(zeta);
  int n_outer = outer_for(h);
  if (!cfg.zeta) {
    zeta = cfg.epsilon / (6.0 * n_outer);
    h = step_for(zeta);
    n_outer = outer_for(h);
  }

  ResolvedConfig out;
  out.h = h;
  out.n_outer = n_outer;
  out.zeta = zeta;
  out.n_max_inner = cfg.n_max_inner ? *cfg.n_max_inner : default_inner_cap(zeta);
  out.seed = cfg.seed;
  if (!(out.h > 0.0)) throw std::invalid_argument("resolve_config: step size must be positive");
  if (smooth_part && out.h > 1.0 / target.f.beta * (1.0 + 1e-12))
    throw std::invalid_argument("resolve_config: h must not exceed 1/beta when f is nonzero");
  if (out.n_outer < 1 || out.n_max_inner < 1) throw std::invalid_argument("resolve_config: iteration counts must be positive");
  if (!(out.zeta > 0.0 && out.zeta < 1.0)) throw std::invalid_argument("resolve_config: zeta must lie in (0,1)");
  return out;
}

// Draw from rho_0 ∝ exp(-g(.) - ((2 beta - alpha_g)/2) ||. - x_star||^2),
// i.e. the RGO of g with step 1/(2 beta - alpha_g) centered at x_star. When
// f = 0 that scale is void and the sampler's own step h is used instead.
inline Vector init_rho0(const CompositeTarget& target, double h, Rng& rng) {
  double step;
  if (target.f.is_zero()) {
    step = h;
  } else {
    const double s = 2.0 * target.f.beta - target.g.alpha_g;
    if (!(s > 0.0)) throw std::invalid_argument("init_rho0: 2 beta - alpha_g must be positive");
    step = 1.0 / s;
  }
  return target.g.rgo.draw(step, target.x_star, rng);
}

// One chain of the composite sampler, advanced one outer iteration at a
// time. Each outer step costs n_max_inner + 1 gradient evaluations.
class CompositeChain {
 public:
  CompositeChain(const CompositeTarget& target, const ResolvedConfig& cfg, Rng& rng)
      : target_(&target), cfg_(cfg), rng_(&rng), state_(init_rho0(target, cfg.h, rng)) {}

  void step() {
    const double h = cfg_.h;
    const Vector y = state_ + std::sqrt(h) * rng_->normal_vector(target_->dim());
    const Vector grad_y = target_->f.gradient(y);
    const double f_y = target_->f.value(y);
    const Vector center = y - h * grad_y;

    // nu and mu share -g(x) - ||x-y||^2/(2h) exactly, so the acceptance
    // ratio only sees the linearization error of f: one f evaluation per
    // proposal and no further gradient evaluations.
    ImhProblem inner;
    inner.log_target_unnorm = [&](const Vector& z) { return -target_->f.value(z); };
    inner.log_proposal_unnorm = [&](const Vector& z) { return -f_y - grad_y.dot(z - y); };
    inner.proposal_draw = [&](Rng& r) { return target_->g.rgo.draw(h, center, r); };
    inner.n_steps = cfg_.n_max_inner;

    ImhResult res;
    try {
      res = imh_run(inner, *rng_);
    } catch (const std::exception& e) {
      throw std::runtime_error("composite sampler: outer iteration " + std::to_string(outer_done_) + ": " + e.what());
    }
    state_ = std::move(res.state);
    last_accepted_ = res.accepted;
    total_accepted_ += res.accepted;
    ++outer_done_;
    grad_evals_ += cfg_.n_max_inner + 1;
  }

  const Vector& state() const { return state_; }
  std::int64_t grad_evals() const { return grad_evals_; }
  std::int64_t outer_done() const { return outer_done_; }
  int last_accepted() const { return last_accepted_; }
  std::int64_t total_accepted() const { return total_accepted_; }
  double inner_acceptance_rate() const {
    return outer_done_ ? static_cast<double>(total_accepted_) / (static_cast<double>(outer_done_) * cfg_.n_max_inner)
                       : 0.0;
  }

 private:
  const CompositeTarget* target_;
  ResolvedConfig cfg_;
  Rng* rng_;
  Vector state_;
  std::int64_t outer_done_ = 0;
  std::int64_t grad_evals_ = 0;
  std::int64_t total_accepted_ = 0;
  int last_accepted_ = 0;
};

inline ChainTrace composite_sampler_run(const CompositeTarget& target, const ResolvedConfig& cfg, Rng& rng) {
  ChainTrace trace;
  trace.seed = cfg.seed;
  trace.reserve(static_cast<std::size_t>(cfg.n_outer));
  CompositeChain chain(target, cfg, rng);
  trace.iterates.push_back(chain.state());
  trace.grad_evals.push_back(0);
  for (int k = 0; k < cfg.n_outer; ++k) {
    chain.step();
    trace.iterates.push_back(chain.state());
    trace.grad_evals.push_back(chain.grad_evals());
    trace.accept_counts.push_back(chain.last_accepted());
  }
  return trace;
}

inline ChainTrace composite_sampler_run(const CompositeTarget& target, const SamplerConfig& cfg, Rng& rng) {
  return composite_sampler_run(target, resolve_config(cfg, target), rng);
}

}  // namespace proxsamp
