#pragma once

// Seeded deterministic pseudo-random stream. Every stochastic operation in
// the library takes one of these by reference; identical seeds reproduce
// bit-identical traces. Streams are never shared between chains.

#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "proxsamp/math.hpp"

namespace proxsamp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // uniform on the open interval (0, 1)
  double uniform() { return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1p-53; }

  // standard normal via the high-accuracy inverse CDF (exact in both tails)
  double normal() { return normal_quantile(uniform()); }

  double exponential() { return -std::log(uniform()); }

  Eigen::VectorXd normal_vector(Eigen::Index d) {
    Eigen::VectorXd z(d);
    for (Eigen::Index i = 0; i < d; ++i) z[i] = normal();
    return z;
  }

  // uniform integer in [0, n)
  std::uint64_t below(std::uint64_t n) {
    // rejection against the top of the range keeps it unbiased
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t r;
    do {
      r = gen_();
    } while (r >= limit);
    return r % n;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace proxsamp
