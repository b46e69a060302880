#pragma once

// Pieces of the dimension-scaling study: a stride-doubling reservoir of
// chain states, exact-target reference draws for the Gaussian-in-box
// target, the self-distance threshold, and the log-log slope fit.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "proxsamp/diagnostics.hpp"
#include "proxsamp/truncated_gaussian.hpp"

namespace proxsamp {

// Keeps an evenly thinned subsample of a growing chain in bounded memory.
// When full, every other entry is dropped and the stride doubles.
class ThinnedReservoir {
 public:
  explicit ThinnedReservoir(std::size_t capacity) : capacity_(capacity) {}

  void add(std::int64_t iteration, const Vector& x) {
    if (seen_++ % stride_ != 0) return;
    entries_.emplace_back(iteration, x);
    if (entries_.size() >= capacity_) {
      std::vector<std::pair<std::int64_t, Vector>> kept;
      kept.reserve(entries_.size() / 2 + 1);
      for (std::size_t i = 0; i < entries_.size(); i += 2) kept.push_back(std::move(entries_[i]));
      entries_ = std::move(kept);
      stride_ *= 2;
    }
  }

  // states with iteration >= current/2, evenly subsampled to at most max_count
  std::vector<Vector> last_half(std::int64_t current_iteration, std::size_t max_count) const {
    const std::int64_t cutoff = current_iteration / 2;
    std::size_t first = 0;
    while (first < entries_.size() && entries_[first].first < cutoff) ++first;
    const std::size_t available = entries_.size() - first;
    std::vector<Vector> out;
    if (available == 0) return out;
    const std::size_t take = std::min(available, max_count);
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i)
      out.push_back(entries_[first + (i * available) / take].second);
    return out;
  }

  std::size_t stored() const { return entries_.size(); }

 private:
  std::size_t capacity_;
  std::size_t stride_ = 1;
  std::int64_t seen_ = 0;
  std::vector<std::pair<std::int64_t, Vector>> entries_;
};

// Exact iid draws from pi ∝ exp(-||x||^2/2) 1_{[-R,R]^d} via the
// per-coordinate inverse CDF; no MCMC error enters the reference.
inline std::vector<Vector> exact_gaussian_box_samples(int d, double R, int n, Rng& rng) {
  const double pa = normal_cdf(-R), pb = normal_cdf(R);
  std::vector<Vector> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    Vector x(d);
    for (int c = 0; c < d; ++c) x[c] = std::clamp(normal_quantile(pa + rng.uniform() * (pb - pa)), -R, R);
    out.push_back(std::move(x));
  }
  return out;
}

// Self-distance threshold: 1.5 x the median sliced W2 between independent
// 10^4-sample exact-target draws. Dimension-adaptive and method-independent.
inline double self_distance_threshold(int d, double R, int n_projections, Rng& rng, int pair_count = 5,
                                      int samples_per_set = 10000) {
  std::vector<double> distances;
  distances.reserve(pair_count);
  for (int p = 0; p < pair_count; ++p) {
    const auto a = exact_gaussian_box_samples(d, R, samples_per_set, rng);
    const auto b = exact_gaussian_box_samples(d, R, samples_per_set, rng);
    distances.push_back(sliced_w2(a, b, n_projections, rng));
  }
  std::sort(distances.begin(), distances.end());
  return 1.5 * distances[distances.size() / 2];
}

struct ScalingPoint {
  int d = 0;
  std::uint64_t seed = 0;
  std::int64_t evals_to_threshold = -1;  // gradient evaluations at first crossing
  bool censored = true;
  double threshold = 0.0;
};

struct SlopeFit {
  bool defined = false;
  double slope = 0.0;
  double intercept = 0.0;  // in log10 space
  int points_used = 0;
};

// Per-d medians over uncensored seeds, then least squares of log(evals)
// against log(d). A dimension with fewer than two uncensored seeds is
// treated as censored; fewer than three usable dimensions leaves the slope
// undefined.
inline SlopeFit fit_scaling_slope(const std::vector<ScalingPoint>& points) {
  std::vector<std::pair<double, double>> xy;  // (log10 d, log10 evals)
  std::vector<int> dims;
  for (const auto& p : points)
    if (std::find(dims.begin(), dims.end(), p.d) == dims.end()) dims.push_back(p.d);
  std::sort(dims.begin(), dims.end());

  for (int d : dims) {
    std::vector<double> evals;
    for (const auto& p : points)
      if (p.d == d && !p.censored) evals.push_back(static_cast<double>(p.evals_to_threshold));
    if (evals.size() < 2) continue;
    std::sort(evals.begin(), evals.end());
    const double median = evals.size() % 2 ? evals[evals.size() / 2]
                                           : 0.5 * (evals[evals.size() / 2 - 1] + evals[evals.size() / 2]);
    xy.emplace_back(std::log10(static_cast<double>(d)), std::log10(median));
  }

  SlopeFit fit;
  fit.points_used = static_cast<int>(xy.size());
  if (xy.size() < 3) return fit;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : xy) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(xy.size());
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.defined = true;
  return fit;
}

}  // namespace proxsamp
