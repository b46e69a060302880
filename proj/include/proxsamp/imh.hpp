#pragma once

// Half-lazy independent Metropolis-Hastings. The proposal ignores the
// current state; the acceptance probability carries the 1/2 laziness factor
// and only ever sees log-density differences, so normalizing constants are
// never needed.

#include <cmath>
#include <functional>
#include <stdexcept>

#include <Eigen/Dense>

#include "proxsamp/math.hpp"
#include "proxsamp/rng.hpp"

namespace proxsamp {

struct ImhProblem {
  std::function<double(const Vector&)> log_target_unnorm;    // nu, up to a constant
  std::function<double(const Vector&)> log_proposal_unnorm;  // mu, up to a constant
  std::function<Vector(Rng&)> proposal_draw;
  int n_steps = 1;
};

// alpha = (1/2) min(1, exp(log_r)) with
// log_r = [log nu(z) - log nu(x)] + [log mu(x) - log mu(z)].
inline double lazy_accept_prob(double log_r) {
  if (std::isnan(log_r)) throw std::invalid_argument("lazy_accept_prob: NaN log ratio");
  if (log_r >= 0.0) return 0.5;
  return 0.5 * std::exp(log_r);
}

struct ImhResult {
  Vector state;
  int accepted = 0;
};

inline ImhResult imh_run(const ImhProblem& problem, Rng& rng) {
  if (problem.n_steps < 1) throw std::invalid_argument("imh_run: n_steps must be at least 1");

  Vector x;
  double log_nu_x = -kInf, log_mu_x = -kInf;
  for (int tries = 0;; ++tries) {
    x = problem.proposal_draw(rng);
    log_nu_x = problem.log_target_unnorm(x);
    if (log_nu_x > -kInf) break;
    if (tries >= 100) throw std::runtime_error("imh_run: initial proposal draw infeasible under the target");
  }
  log_mu_x = problem.log_proposal_unnorm(x);

  int accepted = 0;
  for (int n = 0; n < problem.n_steps; ++n) {
    const Vector z = problem.proposal_draw(rng);
    const double log_nu_z = problem.log_target_unnorm(z);
    const double log_mu_z = problem.log_proposal_unnorm(z);
    const double log_r = log_density_diff(log_nu_z, log_nu_x) + log_density_diff(log_mu_x, log_mu_z);
    if (rng.uniform() <= lazy_accept_prob(log_r)) {
      x = z;
      log_nu_x = log_nu_z;
      log_mu_x = log_mu_z;
      ++accepted;
    }
  }
  return {std::move(x), accepted};
}

}  // namespace proxsamp
