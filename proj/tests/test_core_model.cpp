#include <gtest/gtest.h>

#include <cmath>

#include "proxsamp/diagnostics.hpp"
#include "proxsamp/minimize.hpp"
#include "proxsamp/problems.hpp"

using namespace proxsamp;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

// weighted-average subgradient descent on f + lambda ||.||_1, the
// independent oracle for the proximal-gradient minimizer
Vector subgradient_descent_oracle(const SmoothPotential& f, double lambda, double alpha, long iters) {
  Vector x = Vector::Zero(f.dim);
  Vector weighted_sum = Vector::Zero(f.dim);
  double weight_total = 0.0;
  for (long t = 1; t <= iters; ++t) {
    Vector sub = f.gradient(x);
    for (Eigen::Index i = 0; i < x.size(); ++i) sub[i] += lambda * (x[i] > 0.0 ? 1.0 : (x[i] < 0.0 ? -1.0 : 0.0));
    x -= (2.0 / (alpha * (t + 1))) * sub;
    weighted_sum += static_cast<double>(t) * x;
    weight_total += static_cast<double>(t);
  }
  return weighted_sum / weight_total;
}

}  // namespace

TEST(SmoothPotential, GradientMatchesFiniteDifferences) {
  const auto f = isotropic_quadratic(3, 2.0, vec({1.0, 0.0, -1.0}));
  Rng rng(401);
  for (int rep = 0; rep < 100; ++rep) {
    const Vector x = 3.0 * rng.normal_vector(3);
    const Vector grad = f.gradient(x);
    for (int c = 0; c < 3; ++c) {
      const double eps = 1e-5;
      Vector xp = x, xm = x;
      xp[c] += eps;
      xm[c] -= eps;
      const double fd = (f.value(xp) - f.value(xm)) / (2.0 * eps);
      EXPECT_NEAR(grad[c], fd, 1e-5 * (1.0 + std::abs(fd)));
    }
  }
}

TEST(SmoothPotential, FirstOrderExpansionBoundedByBeta) {
  const auto f = isotropic_quadratic(4, 1.7);
  Rng rng(402);
  for (int rep = 0; rep < 200; ++rep) {
    const Vector x = rng.normal_vector(4);
    const Vector u = rng.normal_vector(4);
    const double eps = 1e-3 * rng.uniform();
    const double lhs = std::abs(f.value(x + eps * u) - f.value(x) - eps * f.gradient(x).dot(u));
    EXPECT_LE(lhs, 0.5 * f.beta * eps * eps * u.squaredNorm() + 1e-12);
  }
}

TEST(OraclePotential, ProxNonexpansiveness) {
  const auto l1 = l1_oracle(2.5);
  const auto box = box_oracle(vec({-1.0, -0.5, 0.0}), vec({1.0, 0.5, 2.0}));
  const auto tilted = tilt_oracle(l1_oracle(1.0), vec({0.4, -0.7, 0.1}));
  Rng rng(403);
  for (int rep = 0; rep < 10000; ++rep) {
    const Vector u = 4.0 * rng.normal_vector(3);
    const Vector v = 4.0 * rng.normal_vector(3);
    const double h = 0.05 + rng.uniform();
    const double dist = (u - v).norm();
    EXPECT_LE((l1.prox(h, u) - l1.prox(h, v)).norm(), dist + 1e-12);
    EXPECT_LE((box.prox(h, u) - box.prox(h, v)).norm(), dist + 1e-12);
    EXPECT_LE((tilted.prox(h, u) - tilted.prox(h, v)).norm(), dist + 1e-12);
  }
}

TEST(OraclePotential, RgoDrawsStayInDomain) {
  const auto box = box_oracle(vec({-1.0}), vec({1.0}));
  Rng rng(404);
  for (int i = 0; i < 2000; ++i) {
    const Vector x = box.rgo.draw(0.7, vec({3.0}), rng);
    EXPECT_LT(box.value(x), kInf);
  }
}

TEST(DescentInequality, HoldsForQuadraticPlusL1) {
  // F(y+) <= F(y) - (1/h - beta/2) ||y - y+||^2 and the F* form, h <= 1/beta
  const auto f = isotropic_quadratic(5, 3.0);
  const auto g = l1_oracle(1.2);
  const auto target = make_composite_target(f, g, Vector(), 1e-12);
  const double f_star = target.potential(target.x_star);

  Rng rng(405);
  for (double h : {1.0 / f.beta, 0.4 / f.beta}) {
    for (int rep = 0; rep < 10000; ++rep) {
      const Vector y = 3.0 * rng.normal_vector(5);
      const Vector y_plus = target.g.prox(h, y - h * target.f.gradient(y));
      const double gap = (y - y_plus).squaredNorm();
      EXPECT_LE(target.potential(y_plus), target.potential(y) - (1.0 / h - f.beta / 2.0) * gap + 1e-9);
      EXPECT_LE(gap, 2.0 * h * (target.potential(y) - f_star) + 1e-9);
    }
  }
}

TEST(FindMinimizer, QuadraticFixedPoint) {
  const auto f = isotropic_quadratic(2);
  const auto result = find_minimizer(f, zero_oracle(), 1e-8, 100000, vec({5.0, 5.0}));
  EXPECT_LE(result.x.norm(), 1e-7);
  EXPECT_LE(result.residual, 1e-8);
}

TEST(FindMinimizer, SoftThresholdFixedPoint) {
  // f = (x-3)^2/2, g = |x|: minimizer is soft(3, 1) = 2
  const auto f = isotropic_quadratic(1, 1.0, vec({3.0}));
  const auto result = find_minimizer(f, l1_oracle(1.0), 1e-10);
  EXPECT_NEAR(result.x[0], 2.0, 1e-9);
}

TEST(FindMinimizer, AgreesWithSubgradientOracle) {
  Vector x_true = Vector::Zero(10);
  x_true.head(3) << 1.0, -0.8, 0.5;
  const double tau = 5.0, lambda = 0.3;
  const auto problem =
      make_logistic_data(10, 20, 0.3, x_true, tau, {PenaltySpec::Kind::kL1, lambda, 0.0}, 406);
  const auto f = logistic_potential(problem);

  const auto result = find_minimizer(f, l1_oracle(lambda), 1e-10);
  EXPECT_LE(result.residual, 1e-10);

  const Vector oracle = subgradient_descent_oracle(f, lambda, tau, 3'000'000);
  EXPECT_LE((result.x - oracle).norm(), 1e-4);
}

TEST(FindMinimizer, FailureCarriesLastIterateAndResidual) {
  Vector x_true = Vector::Zero(4);
  x_true[0] = 2.0;
  const auto problem = make_logistic_data(4, 40, 0.2, x_true, 0.5, {PenaltySpec::Kind::kL1, 0.3, 0.0}, 410);
  const auto f = logistic_potential(problem);
  try {
    find_minimizer(f, l1_oracle(0.3), 1e-12, 2);
    FAIL() << "expected MinimizeError";
  } catch (const MinimizeError& e) {
    EXPECT_EQ(e.last_iterate.size(), 4);
    EXPECT_GT(e.residual, 1e-12);
  }
  EXPECT_THROW(find_minimizer(f, l1_oracle(0.3), -1.0), std::invalid_argument);
}

TEST(CompositeTarget, RecenteringPreservesTheSum) {
  const auto problem = make_logistic_data(6, 30, 0.4, Vector::Zero(6), 1.0, {PenaltySpec::Kind::kL1, 0.7, 0.0}, 407);
  const auto f = logistic_potential(problem);
  const auto g = l1_oracle(0.7);
  const auto target = make_composite_target(f, g);

  // gradient of the shifted f vanishes at x_star; the pair sums unchanged
  EXPECT_LE(target.f.gradient(target.x_star).norm(), 1e-6);
  EXPECT_LE(target.minimizer_residual, 1e-7);
  Rng rng(408);
  for (int i = 0; i < 200; ++i) {
    const Vector x = rng.normal_vector(6);
    EXPECT_NEAR(target.potential(x), f.value(x) + g.value(x), 1e-9 * (1.0 + std::abs(target.potential(x))));
  }
  EXPECT_NEAR(target.alpha, 1.0, 1e-12);
  EXPECT_GE(target.kappa, 1.0);
}

TEST(CompositeTarget, TiltedOracleSamplesItsOwnDensity) {
  // after recentering, g' = g + <w, x>: draws must match the tilted density
  const Vector w = vec({0.6});
  const auto tilted = tilt_oracle(l1_oracle(1.0), w);
  Rng rng(409);
  std::vector<double> xs(100000);
  for (auto& x : xs) x = tilted.rgo.draw(0.5, vec({0.8}), rng)[0];
  const double ks = ks_vs_quadrature(
      xs, [&](double x) { return -std::abs(x) - 0.6 * x - (x - 0.8) * (x - 0.8) / 1.0; });
  EXPECT_LE(ks, 0.01);
}

TEST(CompositeTarget, RequiresPositiveAlpha) {
  const auto f = zero_smooth(2);
  EXPECT_THROW(make_composite_target(f, l1_oracle(1.0), Vector::Zero(2)), std::invalid_argument);
}

TEST(ChainTrace, GradEvalsNondecreasing) {
  ChainTrace trace;
  trace.iterates = {Vector::Zero(1), Vector::Zero(1), Vector::Zero(1)};
  trace.grad_evals = {0, 5, 10};
  for (std::size_t k = 1; k < trace.grad_evals.size(); ++k) EXPECT_GE(trace.grad_evals[k], trace.grad_evals[k - 1]);
}
