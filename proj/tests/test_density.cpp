#include <doctest.h>

#include <cmath>
#include <vector>

#include "parallel_test_util.hpp"
#include "qrivx/density.hpp"
#include "qrivx/distributions.hpp"
#include "qrivx/rng.hpp"

using namespace qrivx;

namespace {

Vector standard_normal_sample(Index n, std::uint64_t seed) {
  Rng rng(seed);
  return rng.normal_vector(n);
}

}  // namespace

TEST_CASE("standard normal density at the median and the tails") {
  const Vector y = standard_normal_sample(2000, 314);
  const Matrix no_x(2000, 0);
  DensityConfig cfg;
  cfg.seed = 11;

  const double at_median = estimate_density_at_zero(y, no_x, 0.5, cfg);
  CHECK(at_median == doctest::Approx(0.3989422804).epsilon(0.05 / 0.3989));

  const double at_tail = estimate_density_at_zero(y, no_x, 0.05, cfg);
  CHECK(std::abs(at_tail - 0.1031356) < 0.03);
}

TEST_CASE("uniform density is flat") {
  Rng rng(2718);
  Vector y(2000);
  for (Index t = 0; t < 2000; ++t) y[t] = rng.uniform();
  DensityConfig cfg;
  cfg.seed = 5;
  const double est = estimate_density_at_zero(y, Matrix(2000, 0), 0.3, cfg);
  CHECK(std::abs(est - 1.0) < 0.1);
}

TEST_CASE("scale equivariance") {
  const Vector y = standard_normal_sample(1500, 99);
  DensityConfig cfg;
  cfg.seed = 7;
  const double base = estimate_density_at_zero(y, Matrix(1500, 0), 0.5, cfg);
  const double scaled = estimate_density_at_zero(2.0 * y, Matrix(1500, 0), 0.5, cfg);
  CHECK(scaled == doctest::Approx(base / 2.0).epsilon(0.15));
}

TEST_CASE("irrelevant predictors barely move the estimate") {
  const Vector y = standard_normal_sample(2000, 55);
  Rng rng(56);
  const Matrix extra = rng.normal_matrix(2000, 3);
  DensityConfig cfg;
  cfg.seed = 8;
  const double without = estimate_density_at_zero(y, Matrix(2000, 0), 0.5, cfg);
  const double with_x = estimate_density_at_zero(y, extra, 0.5, cfg);
  CHECK(std::abs(with_x - without) / without < 0.10);
}

TEST_CASE("averaging variance shrinks roughly like 1/M") {
  // variance of tau(1-tau)/f^2 estimates across seeds should about halve
  // when M1 doubles
  const Index t_len = 300;
  const double tau = 0.5;
  const Vector y = standard_normal_sample(t_len, 1234);
  const Matrix no_x(t_len, 0);

  auto avg_of_eq12 = [&](int m1, std::uint64_t seed) {
    DensityConfig cfg;
    cfg.m1 = m1;
    cfg.m2 = 10;
    cfg.seed = seed;
    const double f = estimate_density_at_zero(y, no_x, tau, cfg);
    return tau * (1.0 - tau) / (f * f);
  };

  const int n_seeds = 50;
  std::vector<double> small(n_seeds), big(n_seeds);
  qrivx::testing::run_indexed(n_seeds, [&](int s) {
    small[s] = avg_of_eq12(10, 100 + s);
    big[s] = avg_of_eq12(20, 500 + s);
  });
  auto variance = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= v.size();
    double s2 = 0.0;
    for (double x : v) s2 += (x - m) * (x - m);
    return s2 / (v.size() - 1);
  };
  const double ratio = variance(big) / variance(small);
  CHECK(ratio > 0.3);
  CHECK(ratio < 0.8);
}

TEST_CASE("determinism and validation") {
  const Vector y = standard_normal_sample(400, 1);
  DensityConfig cfg;
  cfg.m1 = 5;
  cfg.m2 = 10;
  cfg.seed = 42;
  const double a = estimate_density_at_zero(y, Matrix(400, 0), 0.5, cfg);
  const double b = estimate_density_at_zero(y, Matrix(400, 0), 0.5, cfg);
  CHECK(a == b);

  DensityConfig bad;
  bad.m1 = 0;
  CHECK_THROWS_AS(estimate_density_at_zero(y, Matrix(400, 0), 0.5, bad), ParameterError);
  CHECK_THROWS_AS(estimate_density_at_zero(y, Matrix(400, 0), 1.2, cfg), ParameterError);
}
