#include <doctest.h>

#include <cmath>

#include "qrivx/distributions.hpp"
#include "qrivx/types.hpp"

using namespace qrivx;

TEST_CASE("normal quantile hits reference values") {
  CHECK(dist::norm_quantile(0.999) == doctest::Approx(3.090232306167814).epsilon(1e-12));
  CHECK(dist::norm_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(dist::norm_quantile(0.5) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  CHECK(dist::norm_quantile(0.05) == doctest::Approx(-1.6448536269514722).epsilon(1e-12));
}

TEST_CASE("normal cdf/sf are consistent and accurate") {
  CHECK(dist::norm_cdf(-1.96) == doctest::Approx(0.024997895148220435).epsilon(1e-12));
  for (double x : {-8.0, -3.2, -0.7, 0.0, 0.4, 2.9, 7.5}) {
    CHECK(dist::norm_cdf(x) + dist::norm_sf(x) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(dist::norm_cdf(dist::norm_quantile(dist::norm_cdf(x))) ==
          doctest::Approx(dist::norm_cdf(x)).epsilon(1e-12));
  }
}

TEST_CASE("chi-square quantile round-trips through the cdf") {
  CHECK(dist::chi2_quantile(0.999, 1) == doctest::Approx(10.827566170662733).epsilon(1e-10));
  CHECK(dist::chi2_quantile(0.95, 1) == doctest::Approx(3.841458820694124).epsilon(1e-10));
  CHECK(dist::chi2_quantile(0.95, 8) == doctest::Approx(15.50731305586545).epsilon(1e-10));
  for (double df : {1.0, 2.0, 3.0, 5.0, 8.0, 20.0}) {
    for (double p : {0.001, 0.05, 0.3, 0.5, 0.9, 0.95, 0.999}) {
      const double x = dist::chi2_quantile(p, df);
      CHECK(dist::chi2_cdf(x, df) == doctest::Approx(p).epsilon(1e-10));
    }
  }
}

TEST_CASE("incomplete gamma halves sum to one") {
  for (double a : {0.5, 1.0, 2.5, 10.0}) {
    for (double x : {0.01, 0.7, 1.3, 4.0, 25.0}) {
      CHECK(dist::gamma_p(a, x) + dist::gamma_q(a, x) == doctest::Approx(1.0).epsilon(1e-13));
    }
  }
}

TEST_CASE("chi-square with one df matches the squared-normal tail") {
  for (double t : {0.1, 0.7, 1.2, 1.96, 2.6, 3.3}) {
    CHECK(dist::chi2_sf(t * t, 1) == doctest::Approx(2.0 * dist::norm_sf(t)).epsilon(1e-13));
  }
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(dist::norm_quantile(0.0), ParameterError);
  CHECK_THROWS_AS(dist::norm_quantile(1.0), ParameterError);
  CHECK_THROWS_AS(dist::chi2_quantile(0.5, 0.0), ParameterError);
  CHECK_THROWS_AS(dist::gamma_p(-1.0, 1.0), ParameterError);
}
