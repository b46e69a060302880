#pragma once

// Metrics for the experiments and the statistical oracles used by the test
// suite: running RMSE, sliced W2, coverage intervals, KS distance against a
// quadrature-normalized density, and exact-zero / boundary bias fractions.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "proxsamp/math.hpp"
#include "proxsamp/rng.hpp"

namespace proxsamp {

// entry k (1-based) is (1/sqrt(d)) || mean of first k iterates - x_hat ||
inline std::vector<double> running_rmse(const std::vector<Vector>& iterates, const Vector& x_hat) {
  if (iterates.empty()) throw std::invalid_argument("running_rmse: empty iterate list");
  const double scale = 1.0 / std::sqrt(static_cast<double>(x_hat.size()));
  Vector sum = Vector::Zero(x_hat.size());
  std::vector<double> out;
  out.reserve(iterates.size());
  for (std::size_t k = 0; k < iterates.size(); ++k) {
    if (iterates[k].size() != x_hat.size()) throw std::invalid_argument("running_rmse: dimension mismatch");
    sum += iterates[k];
    out.push_back(scale * (sum / static_cast<double>(k + 1) - x_hat).norm());
  }
  return out;
}

namespace detail {

// squared W2 between two equal-size 1D empirical distributions
inline double w2_squared_sorted(std::vector<double>& a, std::vector<double>& b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    total += diff * diff;
  }
  return total / static_cast<double>(a.size());
}

// random subset of m row indices out of n (partial Fisher-Yates)
inline std::vector<std::size_t> subsample_indices(std::size_t n, std::size_t m, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < m; ++i) std::swap(idx[i], idx[i + rng.below(n - i)]);
  idx.resize(m);
  return idx;
}

}  // namespace detail

// Average 1D W2 over random unit projection directions, as the square root
// of the mean squared projected distance. Unequal sample sets are first
// subsampled to the smaller size.
inline double sliced_w2(const std::vector<Vector>& samples_a, const std::vector<Vector>& samples_b,
                        int n_projections, Rng& rng) {
  if (samples_a.empty() || samples_b.empty()) throw std::invalid_argument("sliced_w2: empty sample set");
  if (n_projections < 1) throw std::invalid_argument("sliced_w2: need at least one projection");
  const Eigen::Index d = samples_a.front().size();
  if (samples_b.front().size() != d) throw std::invalid_argument("sliced_w2: dimension mismatch");

  const std::size_t m = std::min(samples_a.size(), samples_b.size());
  auto pack = [&](const std::vector<Vector>& samples) -> Matrix {
    Matrix out(static_cast<Eigen::Index>(m), d);
    if (samples.size() == m) {
      for (std::size_t i = 0; i < m; ++i) out.row(static_cast<Eigen::Index>(i)) = samples[i];
    } else {
      const auto idx = detail::subsample_indices(samples.size(), m, rng);
      for (std::size_t i = 0; i < m; ++i) out.row(static_cast<Eigen::Index>(i)) = samples[idx[i]];
    }
    return out;
  };
  const Matrix a = pack(samples_a);
  const Matrix b = pack(samples_b);

  Matrix directions(d, n_projections);
  for (int p = 0; p < n_projections; ++p) directions.col(p) = rng.normal_vector(d).normalized();
  const Matrix proj_a = a * directions;
  const Matrix proj_b = b * directions;

  double total = 0.0;
  std::vector<double> col_a(m), col_b(m);
  for (int p = 0; p < n_projections; ++p) {
    for (std::size_t i = 0; i < m; ++i) {
      col_a[i] = proj_a(static_cast<Eigen::Index>(i), p);
      col_b[i] = proj_b(static_cast<Eigen::Index>(i), p);
    }
    total += detail::w2_squared_sorted(col_a, col_b);
  }
  return std::sqrt(total / n_projections);
}

// Per-coordinate empirical quantile interval at the given level, after
// dropping the first 20% of the chain as burn-in.
inline std::vector<std::pair<double, double>> coverage_intervals(const std::vector<Vector>& iterates, double level) {
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("coverage_intervals: level must lie in (0,1)");
  if (iterates.size() < 100) throw std::runtime_error("coverage_intervals: need at least 100 iterates");
  const std::size_t burn = iterates.size() / 5;
  const std::size_t n = iterates.size() - burn;
  const Eigen::Index d = iterates.front().size();

  auto quantile = [](std::vector<double>& sorted, double p) {
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return (1.0 - frac) * sorted[lo] + frac * sorted[hi];
  };

  std::vector<std::pair<double, double>> out;
  out.reserve(static_cast<std::size_t>(d));
  std::vector<double> column(n);
  for (Eigen::Index c = 0; c < d; ++c) {
    for (std::size_t i = 0; i < n; ++i) column[i] = iterates[burn + i][c];
    std::sort(column.begin(), column.end());
    const double tail = (1.0 - level) / 2.0;
    out.emplace_back(quantile(column, tail), quantile(column, 1.0 - tail));
  }
  return out;
}

// ---------------------------------------------------------------------------
// KS distance against a quadrature-normalized 1D density

namespace detail {

struct CdfGrid {
  std::vector<double> x;
  std::vector<double> cdf;

  double eval(double q) const {
    if (q <= x.front()) return 0.0;
    if (q >= x.back()) return 1.0;
    const auto it = std::upper_bound(x.begin(), x.end(), q);
    const std::size_t j = static_cast<std::size_t>(it - x.begin()) - 1;
    const double frac = (q - x[j]) / (x[j + 1] - x[j]);
    return cdf[j] + frac * (cdf[j + 1] - cdf[j]);
  }
};

// expands an infinite support until the density is negligible at the ends
inline std::pair<double, double> effective_support(const std::function<double(double)>& log_density, double lo,
                                                   double hi, double sample_lo, double sample_hi) {
  double left = std::isfinite(lo) ? lo : sample_lo;
  double right = std::isfinite(hi) ? hi : sample_hi;
  if (!(left < right)) {
    left -= 1.0;
    right += 1.0;
  }
  double peak = -kInf;
  const double width0 = right - left;
  for (int i = 0; i <= 64; ++i) peak = std::max(peak, log_density(left + width0 * i / 64.0));
  for (int rounds = 0; !std::isfinite(lo) && rounds < 64 && log_density(left) > peak - 46.0; ++rounds)
    left -= std::max(1.0, 0.25 * (right - left));
  for (int rounds = 0; !std::isfinite(hi) && rounds < 64 && log_density(right) > peak - 46.0; ++rounds)
    right += std::max(1.0, 0.25 * (right - left));
  return {left, right};
}

inline CdfGrid quadrature_cdf(const std::function<double(double)>& log_density, double lo, double hi) {
  std::size_t n = 4096;
  double prev_mass = -1.0;
  for (;;) {
    CdfGrid grid;
    grid.x.resize(n + 1);
    std::vector<double> logs(n + 1);
    double log_max = -kInf;
    for (std::size_t j = 0; j <= n; ++j) {
      grid.x[j] = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(n);
      logs[j] = log_density(grid.x[j]);
      log_max = std::max(log_max, logs[j]);
    }
    if (log_max == -kInf) throw QuadratureError("quadrature_cdf: density vanishes on the support");
    const double dx = (hi - lo) / static_cast<double>(n);
    grid.cdf.assign(n + 1, 0.0);
    double total = 0.0;
    double w_prev = std::exp(logs[0] - log_max);
    for (std::size_t j = 0; j < n; ++j) {
      const double w_next = std::exp(logs[j + 1] - log_max);
      total += 0.5 * (w_prev + w_next) * dx;
      grid.cdf[j + 1] = total;
      w_prev = w_next;
    }
    if (!(total > 0.0)) throw QuadratureError("quadrature_cdf: zero total mass");
    for (auto& c : grid.cdf) c /= total;
    if (prev_mass > 0.0 && std::abs(total - prev_mass) <= 1e-9 * total) return grid;
    prev_mass = total;
    n *= 2;
    if (n > (1u << 22)) throw QuadratureError("quadrature_cdf: grid refinement did not converge");
  }
}

}  // namespace detail

// Sup distance between the empirical CDF of the samples and the CDF of the
// normalized density exp(log_density_unnorm) on [lo, hi] (either bound may
// be infinite).
inline double ks_vs_quadrature(std::vector<double> samples, const std::function<double(double)>& log_density_unnorm,
                               double lo = -kInf, double hi = kInf) {
  if (samples.size() < 1000) throw std::invalid_argument("ks_vs_quadrature: need at least 1000 samples");
  std::sort(samples.begin(), samples.end());
  const auto [left, right] =
      detail::effective_support(log_density_unnorm, lo, hi, samples.front() - 1.0, samples.back() + 1.0);
  const detail::CdfGrid grid = detail::quadrature_cdf(log_density_unnorm, left, right);

  const double n = static_cast<double>(samples.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double F = grid.eval(samples[i]);
    ks = std::max(ks, std::abs(F - static_cast<double>(i) / n));
    ks = std::max(ks, std::abs(F - static_cast<double>(i + 1) / n));
  }
  return ks;
}

// ---------------------------------------------------------------------------
// bias indicators

struct BiasGeometry {
  enum class Kind { kL1Zero, kBoxBoundary };
  Kind kind = Kind::kL1Zero;
  double lo = 0.0, hi = 0.0;  // box bounds when kind = kBoxBoundary
};

// Fraction of final-iterate coordinates exactly at the penalty's bias set:
// exactly zero for l1, exactly on the boundary for a box. Exact floating
// point comparison on purpose; unbiased samplers hit these sets with
// probability zero.
inline double bias_indicator(const Vector& final_iterate, const BiasGeometry& geometry) {
  if (final_iterate.size() == 0) return 0.0;
  int hits = 0;
  for (Eigen::Index i = 0; i < final_iterate.size(); ++i) {
    if (geometry.kind == BiasGeometry::Kind::kL1Zero) {
      if (final_iterate[i] == 0.0) ++hits;
    } else {
      if (final_iterate[i] == geometry.lo || final_iterate[i] == geometry.hi) ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(final_iterate.size());
}

}  // namespace proxsamp
