#pragma once

// Experiment targets: Bayesian logistic regression with an l1 prior or box
// constraint, and the Gaussian-in-box scaling target. Problems serialize to
// JSON so a run can be reproduced exactly.

#include <cstdint>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "proxsamp/minimize.hpp"
#include "proxsamp/potentials.hpp"

namespace proxsamp {

struct PenaltySpec {
  enum class Kind { kL1, kBox };
  Kind kind = Kind::kL1;
  double lambda = 0.0;  // l1 weight
  double radius = 0.0;  // box half-width
};

struct LogisticProblem {
  Matrix design;          // n x d, rows rescaled to norm sqrt(n)
  Eigen::VectorXd labels; // entries in {0, 1}
  double tau = 0.0;       // ridge strength
  PenaltySpec penalty;
  Vector x_true;
  double rho = 0.0;       // AR(1) correlation of the raw rows
  std::uint64_t seed = 0;

  int dim() const { return static_cast<int>(design.cols()); }
  int n_obs() const { return static_cast<int>(design.rows()); }
};

namespace detail {

// largest eigenvalue of A'A by power iteration (deterministic start)
inline double operator_norm_squared(const Matrix& A) {
  const Matrix gram = A.transpose() * A;
  Vector v = Vector::Ones(gram.rows()).normalized();
  double lambda = 0.0;
  for (int it = 0; it < 1000; ++it) {
    Vector w = gram * v;
    const double next = v.dot(w);
    v = w.normalized();
    if (std::abs(next - lambda) <= 1e-13 * std::max(1.0, std::abs(next)) && it > 10) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return lambda;
}

}  // namespace detail

// f(x) = sum_i { log(1 + exp(<a_i, x>)) - y_i <a_i, x> } + (tau/2) ||x||^2
// with beta = ||A||_op^2 / 4 + tau and alpha_f = tau.
inline SmoothPotential logistic_potential(const LogisticProblem& problem) {
  const Matrix A = problem.design;
  const Eigen::VectorXd y = problem.labels;
  const double tau = problem.tau;

  SmoothPotential f;
  f.dim = problem.dim();
  f.beta = detail::operator_norm_squared(A) / 4.0 + tau;
  f.alpha_f = tau;
  f.value = [A, y, tau](const Vector& x) {
    const Vector margins = A * x;
    double total = 0.0;
    for (Eigen::Index i = 0; i < margins.size(); ++i) total += log1pexp(margins[i]) - y[i] * margins[i];
    return total + 0.5 * tau * x.squaredNorm();
  };
  f.gradient = [A, y, tau](const Vector& x) {
    const Vector margins = A * x;
    Vector s(margins.size());
    for (Eigen::Index i = 0; i < margins.size(); ++i) s[i] = sigmoid(margins[i]) - y[i];
    return (A.transpose() * s + tau * x).eval();
  };
  return f;
}

// Rows from N(0, Sigma) with Sigma_{ij} = rho^|i-j|: the AR(1) recursion is
// exactly the action of the lower-triangular factor of Sigma.
inline Matrix ar1_rows(int n, int d, double rho, Rng& rng) {
  if (!(std::abs(rho) < 1.0)) throw std::invalid_argument("ar1_rows: |rho| must be below 1");
  Matrix A(n, d);
  const double innovation = std::sqrt(1.0 - rho * rho);
  for (int i = 0; i < n; ++i) {
    double prev = rng.normal();
    A(i, 0) = prev;
    for (int j = 1; j < d; ++j) {
      prev = rho * prev + innovation * rng.normal();
      A(i, j) = prev;
    }
  }
  return A;
}

// Rows drawn from N(0, Sigma) rescaled to norm sqrt(n); labels
// Bernoulli(sigmoid(<a_i, x_true>)).
inline LogisticProblem make_logistic_data(int d, int n, double rho, const Vector& x_true, double tau,
                                          PenaltySpec penalty, std::uint64_t seed) {
  if (x_true.size() != d) throw std::invalid_argument("make_logistic_data: x_true dimension mismatch");

  LogisticProblem problem;
  problem.tau = tau;
  problem.penalty = penalty;
  problem.x_true = x_true;
  problem.rho = rho;
  problem.seed = seed;

  Rng rng(seed);
  Matrix A = ar1_rows(n, d, rho, rng);
  for (int i = 0; i < n; ++i) A.row(i) *= std::sqrt(static_cast<double>(n)) / A.row(i).norm();
  problem.design = std::move(A);

  problem.labels.resize(n);
  for (int i = 0; i < n; ++i) {
    const double p = sigmoid(problem.design.row(i).dot(x_true));
    problem.labels[i] = rng.uniform() < p ? 1.0 : 0.0;
  }
  return problem;
}

inline OracleConvexPotential penalty_oracle(const PenaltySpec& penalty, int dim) {
  if (penalty.kind == PenaltySpec::Kind::kL1) return l1_oracle(penalty.lambda);
  const Vector lo = Vector::Constant(dim, -penalty.radius);
  const Vector hi = Vector::Constant(dim, penalty.radius);
  return box_oracle(lo, hi);
}

inline CompositeTarget logistic_target(const LogisticProblem& problem, double minimizer_tol = 1e-8) {
  return make_composite_target(logistic_potential(problem), penalty_oracle(problem.penalty, problem.dim()),
                               Vector(), minimizer_tol);
}

// pi(x) ∝ exp(-||x||^2/2) 1_{[-R,R]^d}: f = ||.||^2/2, g the box indicator,
// shared minimizer at the origin.
inline CompositeTarget gaussian_box_target(int d, double R) {
  if (d < 1 || !(R > 0.0)) throw std::invalid_argument("gaussian_box_target: need d >= 1 and R > 0");
  const Vector lo = Vector::Constant(d, -R);
  const Vector hi = Vector::Constant(d, R);
  return make_composite_target(isotropic_quadratic(d), box_oracle(lo, hi), Vector::Zero(d));
}

// ---------------------------------------------------------------------------
// JSON round trip

inline void to_json(nlohmann::json& j, const PenaltySpec& penalty) {
  if (penalty.kind == PenaltySpec::Kind::kL1)
    j = {{"type", "l1"}, {"lambda", penalty.lambda}};
  else
    j = {{"type", "box"}, {"radius", penalty.radius}};
}

inline void from_json(const nlohmann::json& j, PenaltySpec& penalty) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "l1") {
    penalty.kind = PenaltySpec::Kind::kL1;
    penalty.lambda = j.at("lambda").get<double>();
  } else if (type == "box") {
    penalty.kind = PenaltySpec::Kind::kBox;
    penalty.radius = j.at("radius").get<double>();
  } else {
    throw std::invalid_argument("PenaltySpec: unknown type '" + type + "'");
  }
}

inline void to_json(nlohmann::json& j, const LogisticProblem& problem) {
  // Eigen stores column-major; emit row-major
  std::vector<double> row_major;
  row_major.reserve(static_cast<std::size_t>(problem.design.size()));
  for (int i = 0; i < problem.n_obs(); ++i)
    for (int k = 0; k < problem.dim(); ++k) row_major.push_back(problem.design(i, k));
  j = nlohmann::json{{"n", problem.n_obs()},
                     {"d", problem.dim()},
                     {"design_row_major", row_major},
                     {"labels", std::vector<double>(problem.labels.data(), problem.labels.data() + problem.labels.size())},
                     {"tau", problem.tau},
                     {"penalty", problem.penalty},
                     {"x_true", std::vector<double>(problem.x_true.data(), problem.x_true.data() + problem.x_true.size())},
                     {"rho", problem.rho},
                     {"seed", problem.seed}};
}

inline void from_json(const nlohmann::json& j, LogisticProblem& problem) {
  const int n = j.at("n").get<int>();
  const int d = j.at("d").get<int>();
  const auto flat = j.at("design_row_major").get<std::vector<double>>();
  if (static_cast<int>(flat.size()) != n * d) throw std::invalid_argument("LogisticProblem: design size mismatch");
  problem.design.resize(n, d);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < d; ++k) problem.design(i, k) = flat[static_cast<std::size_t>(i) * d + k];
  const auto labels = j.at("labels").get<std::vector<double>>();
  problem.labels = Eigen::Map<const Eigen::VectorXd>(labels.data(), static_cast<Eigen::Index>(labels.size()));
  problem.tau = j.at("tau").get<double>();
  problem.penalty = j.at("penalty").get<PenaltySpec>();
  const auto xt = j.at("x_true").get<std::vector<double>>();
  problem.x_true = Eigen::Map<const Vector>(xt.data(), static_cast<Eigen::Index>(xt.size()));
  problem.rho = j.at("rho").get<double>();
  problem.seed = j.at("seed").get<std::uint64_t>();
}

}  // namespace proxsamp
