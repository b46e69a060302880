#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "proxsamp/composite_sampler.hpp"
#include "proxsamp/diagnostics.hpp"
#include "proxsamp/minimize.hpp"
#include "proxsamp/problems.hpp"

using namespace proxsamp;

namespace {

Vector vec1(double x) {
  Vector v(1);
  v[0] = x;
  return v;
}

// g(x) = (a/2) ||x||^2 as an oracle potential
OracleConvexPotential quadratic_oracle(int dim, double a) {
  OracleConvexPotential g;
  g.value = [a](const Vector& x) { return 0.5 * a * x.squaredNorm(); };
  g.prox = [a](double h, const Vector& v) { return (v / (1.0 + a * h)).eval(); };
  g.rgo = rgo_quadratic(a * Matrix::Identity(dim, dim), Vector::Zero(dim));
  g.alpha_g = a;
  return g;
}

}  // namespace

TEST(DefaultStepSize, CapAndFormula) {
  // beta=1, d=1, kappa=1, zeta=1/e: formula gives 1/sqrt(log 2), capped at 1/2
  EXPECT_DOUBLE_EQ(default_step_size(1.0, 1, 1.0, std::exp(-1.0)), 0.5);
  // d=64, zeta=0.01: 1/(sqrt(64 log 2) log^2 100)
  const double expected = 1.0 / (std::sqrt(64.0 * std::log(2.0)) * std::pow(std::log(100.0), 2));
  EXPECT_NEAR(default_step_size(1.0, 64, 1.0, 0.01), expected, 1e-15);
  EXPECT_NEAR(expected, 0.0071, 2e-4);
}

TEST(DefaultStepSize, HomogeneousInBeta) {
  const double h1 = default_step_size(1.0, 64, 1.0, 0.01);
  const double h2 = default_step_size(2.0, 64, 1.0, 0.01);
  EXPECT_NEAR(h2, h1 / 2.0, 1e-15);
  EXPECT_THROW(default_step_size(0.0, 1, 1.0, 0.5), std::invalid_argument);
}

TEST(ResolveConfig, FixedPointPassSetsZetaFromK) {
  // one pass: K_0 from zeta_0 = eps, then zeta = eps/(6 K_0), then (h, K)
  const auto target = gaussian_box_target(4, 1.0);
  SamplerConfig cfg;
  cfg.epsilon = 0.05;
  const auto resolved = resolve_config(cfg, target);

  const double h0 = default_step_size(1.0, 4, target.kappa, cfg.epsilon);
  const int k0 = default_outer_iterations(target.alpha, h0, 4, target.kappa, cfg.epsilon);
  const double zeta = cfg.epsilon / (6.0 * k0);
  EXPECT_DOUBLE_EQ(resolved.zeta, zeta);
  EXPECT_DOUBLE_EQ(resolved.h, default_step_size(1.0, 4, target.kappa, zeta));
  EXPECT_EQ(resolved.n_outer, default_outer_iterations(target.alpha, resolved.h, 4, target.kappa, cfg.epsilon));
  EXPECT_EQ(resolved.n_max_inner, static_cast<int>(std::ceil(10.0 * std::log(1.0 / zeta))));
  EXPECT_LE(resolved.h, 0.5);  // cap 1/(2 beta), beta = 1
}

TEST(ResolveConfig, ExplicitOverridesWin) {
  const auto target = gaussian_box_target(2, 1.0);
  SamplerConfig cfg;
  cfg.h = 0.25;
  cfg.n_outer = 123;
  cfg.n_max_inner = 7;
  cfg.zeta = 0.02;
  const auto resolved = resolve_config(cfg, target);
  EXPECT_EQ(resolved.h, 0.25);
  EXPECT_EQ(resolved.n_outer, 123);
  EXPECT_EQ(resolved.n_max_inner, 7);
  EXPECT_EQ(resolved.zeta, 0.02);
}

TEST(ResolveConfig, RejectsStepAboveOneOverBeta) {
  const auto target = gaussian_box_target(2, 1.0);  // beta = 1
  SamplerConfig cfg;
  cfg.h = 1.5;
  EXPECT_THROW(resolve_config(cfg, target), std::invalid_argument);
}

TEST(InitRho0, PureGaussianWhenGIsZero) {
  // g = 0: rho_0 = N(x_star, (2 beta - alpha_g)^{-1} I)
  CompositeTarget target;
  target.f = isotropic_quadratic(2, 1.0);
  target.g = zero_oracle();
  target.x_star = Vector::Zero(2);
  target.alpha = 1.0;
  target.kappa = 1.0;

  Rng rng(601);
  const int n = 40000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vector x = init_rho0(target, 0.1, rng);
    sum += x[0];
    sumsq += x[0] * x[0];
  }
  EXPECT_NEAR(sum / n, 0.0, 0.02);
  EXPECT_NEAR(sumsq / n, 0.5, 0.02);  // variance 1/(2 beta) = 0.5
}

TEST(InitRho0, BoxSupportRespected) {
  const auto target = gaussian_box_target(3, 1.0);
  Rng rng(602);
  for (int i = 0; i < 2000; ++i) {
    const Vector x = init_rho0(target, 0.2, rng);
    EXPECT_LE(x.lpNorm<Eigen::Infinity>(), 1.0);
  }
}

TEST(InitRho0, L1CaseMatchesQuadrature) {
  // beta = 1, alpha_g = 0, x* = 0: rho_0 ∝ exp(-|x| - x^2)
  CompositeTarget target;
  target.f = isotropic_quadratic(1, 1.0);
  target.g = l1_oracle(1.0);
  target.x_star = Vector::Zero(1);
  target.alpha = 1.0;
  target.kappa = 1.0;

  Rng rng(603);
  std::vector<double> xs(100000);
  for (auto& x : xs) x = init_rho0(target, 0.25, rng)[0];
  const double ks = ks_vs_quadrature(xs, [](double x) { return -std::abs(x) - x * x; });
  EXPECT_LE(ks, 0.01);
}

TEST(InitRho0, FailsWhenScaleDegenerate) {
  CompositeTarget target;
  target.f = isotropic_quadratic(1, 0.1);  // beta = 0.1
  target.g = l1_oracle(1.0);
  target.g.alpha_g = 1.0;  // 2 beta - alpha_g < 0
  target.x_star = Vector::Zero(1);
  Rng rng(604);
  EXPECT_THROW(init_rho0(target, 0.1, rng), std::invalid_argument);
}

TEST(CompositeSampler, ZeroSmoothPartAcceptsAtHalfAndIsExact) {
  // f = 0 makes nu = mu exactly: every inner step accepts with prob 1/2 and
  // the outer chain is the exact proximal sampler for g
  const auto target = make_composite_target(zero_smooth(1), quadratic_oracle(1, 1.0), Vector::Zero(1));
  ResolvedConfig cfg;
  cfg.h = 0.8;
  cfg.n_outer = 3000;
  cfg.n_max_inner = 10;
  cfg.zeta = 0.05;
  cfg.seed = 605;
  Rng rng(cfg.seed);
  const auto trace = composite_sampler_run(target, cfg, rng);

  long accepted = 0;
  for (int a : trace.accept_counts) accepted += a;
  const double rate = static_cast<double>(accepted) / (3000.0 * 10.0);
  EXPECT_NEAR(rate, 0.5, 0.01);

  double sumsq = 0.0;
  int count = 0;
  for (std::size_t k = trace.iterates.size() / 2; k < trace.iterates.size(); ++k) {
    sumsq += trace.iterates[k].squaredNorm();
    ++count;
  }
  EXPECT_NEAR(sumsq / count, 1.0, 0.1);  // pi = N(0, 1)
}

TEST(CompositeSampler, RecoversStandardGaussian) {
  // 1D f = x^2/2, g = 0 (as a weak quadratic oracle so alpha > 0 without g)
  const auto target = make_composite_target(isotropic_quadratic(1, 1.0), zero_oracle(), Vector::Zero(1));
  ResolvedConfig cfg;
  cfg.h = 0.25;
  cfg.n_outer = 2000;
  cfg.n_max_inner = 20;
  cfg.zeta = 0.05;
  cfg.seed = 606;

  // pool tail iterates across independent chains
  std::vector<double> pooled;
  for (int chain = 0; chain < 50; ++chain) {
    Rng rng(cfg.seed + chain);
    const auto trace = composite_sampler_run(target, cfg, rng);
    for (std::size_t k = trace.iterates.size() / 2; k < trace.iterates.size(); ++k)
      pooled.push_back(trace.iterates[k][0]);
  }
  double sum = 0.0, sumsq = 0.0;
  for (double x : pooled) {
    sum += x;
    sumsq += x * x;
  }
  const double mean = sum / pooled.size();
  const double var = sumsq / pooled.size() - mean * mean;
  EXPECT_NEAR(mean, 0.0, 0.02);
  EXPECT_NEAR(var, 1.0, 0.05);
}

TEST(CompositeSampler, BoxTargetStaysFeasible) {
  const auto target = gaussian_box_target(4, 1.0);
  SamplerConfig cfg;
  cfg.h = 0.3;
  cfg.n_outer = 3000;
  cfg.n_max_inner = 15;
  cfg.seed = 607;
  Rng rng(cfg.seed);
  const auto trace = composite_sampler_run(target, cfg, rng);
  for (const auto& x : trace.iterates) EXPECT_LT(target.g_value(x), kInf);
  EXPECT_EQ(trace.iterates.size(), 3001u);
}

TEST(CompositeSampler, GradientAccountingIsNmaxPlusOne) {
  const auto target = gaussian_box_target(2, 1.0);
  SamplerConfig cfg;
  cfg.h = 0.3;
  cfg.n_outer = 50;
  cfg.n_max_inner = 12;
  cfg.seed = 608;
  Rng rng(cfg.seed);
  const auto trace = composite_sampler_run(target, cfg, rng);
  ASSERT_EQ(trace.grad_evals.size(), 51u);
  for (int k = 0; k <= 50; ++k) EXPECT_EQ(trace.grad_evals[static_cast<std::size_t>(k)], 13 * k);
  EXPECT_EQ(trace.accept_counts.size(), 50u);
}

TEST(CompositeSampler, ProposalModeIsProxOfDriftedCenter) {
  // the proposal's log density peaks at prox(h, y - h grad f(y))
  const auto problem =
      make_logistic_data(1, 30, 0.0, vec1(1.0), 0.5, {PenaltySpec::Kind::kL1, 0.8, 0.0}, 609);
  const auto target = logistic_target(problem);
  const double h = 0.4 / target.f.beta;

  Rng rng(610);
  for (int rep = 0; rep < 20; ++rep) {
    const Vector y = vec1(2.0 * rng.normal());
    const Vector center = y - h * target.f.gradient(y);
    const Vector mode = target.g.prox(h, center);
    // scan the proposal log density on a local grid around the mode
    double best = -kInf, best_x = 0.0;
    for (int i = -400; i <= 400; ++i) {
      const double x = mode[0] + i * 1e-3;
      const double ld = target.g.rgo.log_density_unnormalized(h, center, vec1(x));
      if (ld > best) {
        best = ld;
        best_x = x;
      }
    }
    EXPECT_NEAR(best_x, mode[0], 2e-3);
  }
}

TEST(CompositeSampler, DescentInequalityAlongChain) {
  const auto problem = make_logistic_data(5, 50, 0.4, Vector::Zero(5), 0.5,
                                          {PenaltySpec::Kind::kL1, 0.6, 0.0}, 611);
  const auto target = logistic_target(problem);
  const double f_star = target.potential(target.x_star);
  const double h = 1.0 / target.f.beta;

  SamplerConfig cfg;
  cfg.h = h;
  cfg.n_outer = 300;
  cfg.n_max_inner = 5;
  cfg.seed = 612;
  Rng rng(cfg.seed);
  const auto trace = composite_sampler_run(target, cfg, rng);

  Rng forward(613);
  for (const auto& x : trace.iterates) {
    const Vector y = x + std::sqrt(h) * forward.normal_vector(5);
    const Vector y_plus = target.g.prox(h, y - h * target.f.gradient(y));
    EXPECT_LE((y - y_plus).squaredNorm(), 2.0 * h * (target.potential(y) - f_star) + 1e-9);
  }
}

TEST(CompositeSampler, EqualSeedsBitIdenticalTraces) {
  const auto target = gaussian_box_target(3, 1.0);
  SamplerConfig cfg;
  cfg.h = 0.2;
  cfg.n_outer = 200;
  cfg.n_max_inner = 8;
  cfg.seed = 614;
  Rng r1(cfg.seed), r2(cfg.seed);
  const auto a = composite_sampler_run(target, cfg, r1);
  const auto b = composite_sampler_run(target, cfg, r2);
  ASSERT_EQ(a.iterates.size(), b.iterates.size());
  for (std::size_t k = 0; k < a.iterates.size(); ++k) EXPECT_EQ(a.iterates[k], b.iterates[k]);
  EXPECT_EQ(a.grad_evals, b.grad_evals);
  EXPECT_EQ(a.accept_counts, b.accept_counts);
}

TEST(CompositeSampler, InnerFailureNamesOuterIteration) {
  CompositeTarget target;
  target.f = isotropic_quadratic(1, 1.0);
  target.g = zero_oracle();
  auto calls = std::make_shared<int>(0);
  target.g.rgo = RgoSampler([](const Vector&) { return 0.0; },
                            [calls](double, const Vector& v, Rng& rng) -> Vector {
                              if (++*calls > 5) throw std::runtime_error("synthetic oracle failure");
                              return v + rng.normal_vector(v.size());
                            });
  target.x_star = Vector::Zero(1);
  target.alpha = 1.0;
  target.kappa = 1.0;

  ResolvedConfig cfg;
  cfg.h = 0.5;
  cfg.n_outer = 100;
  cfg.n_max_inner = 3;
  cfg.zeta = 0.1;
  cfg.seed = 615;
  Rng rng(cfg.seed);
  try {
    composite_sampler_run(target, cfg, rng);
    FAIL() << "expected propagated inner failure";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("outer iteration"), std::string::npos);
  }
}
