#include <doctest.h>

#include <cmath>

#include "qrivx/qr_solver.hpp"
#include "qrivx/rng.hpp"
#include "support/oracles.hpp"

using namespace qrivx;

TEST_CASE("check loss formula") {
  CHECK(check_loss(0.0, 0.5) == 0.0);
  CHECK(check_loss(2.0, 0.5) == doctest::Approx(1.0));
  CHECK(check_loss(-1.0, 0.25) == doctest::Approx(0.75));
  CHECK_THROWS_AS(check_loss(1.0, 0.0), ParameterError);
  CHECK_THROWS_AS(check_loss(1.0, 1.0), ParameterError);
}

TEST_CASE("check loss reflection identities") {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const double u = 3.0 * rng.normal();
    const double tau = rng.uniform();
    CHECK(check_loss(u, tau) == doctest::Approx(check_loss(-u, 1.0 - tau)).epsilon(1e-12));
    CHECK(check_loss(u, tau) + check_loss(-u, tau) ==
          doctest::Approx(std::abs(u)).epsilon(1e-12));
  }
}

TEST_CASE("intercept-only median recovers the sample median") {
  Matrix x = Matrix::Ones(5, 1);
  Vector y(5);
  y << 1, 2, 3, 4, 5;
  const QuantileFit fit = fit_quantile(x, y, 0.5);
  CHECK(fit.coefficients[0] == doctest::Approx(3.0).epsilon(1e-7));
  CHECK(fit.objective == doctest::Approx(3.0).epsilon(1e-7));
}

TEST_CASE("intercept-only fit beats any other constant") {
  Matrix x = Matrix::Ones(7, 1);
  Vector y(7);
  y << 0.3, -1.2, 2.0, 0.9, 4.1, -0.5, 1.1;
  for (double tau : {0.1, 0.37, 0.64, 0.9}) {
    const QuantileFit fit = fit_quantile(x, y, tau);
    for (double c = -2.0; c <= 5.0; c += 0.1) {
      double obj = 0.0;
      for (Index t = 0; t < y.size(); ++t) obj += check_loss(y[t] - c, tau);
      CHECK(fit.objective <= obj + 1e-7);
    }
  }
}

TEST_CASE("objective matches the vertex-enumeration LP oracle") {
  Rng rng(17);
  for (int rep = 0; rep < 60; ++rep) {
    const Index n = 12 + static_cast<Index>(rng.uniform() * 38);
    const Index p = 1 + static_cast<Index>(rng.uniform() * 3);
    Matrix x(n, p);
    x.col(0).setOnes();
    for (Index j = 1; j < p; ++j) x.col(j) = rng.normal_vector(n);
    const Vector y = rng.normal_vector(n) * 2.0;
    const double tau = 0.05 + 0.9 * rng.uniform();

    const QuantileFit fit = fit_quantile(x, y, tau);
    const double oracle = testing::lp_quantile_objective(x, y, tau);
    CHECK(std::abs(fit.objective - oracle) < 1e-6);
  }
}

TEST_CASE("coefficient perturbations never improve the objective") {
  Rng rng(23);
  Matrix x(80, 3);
  x.col(0).setOnes();
  x.col(1) = rng.normal_vector(80);
  x.col(2) = rng.normal_vector(80);
  const Vector y = x.col(1) * 0.5 + rng.normal_vector(80);
  for (double tau : {0.2, 0.5, 0.8}) {
    const QuantileFit fit = fit_quantile(x, y, tau);
    for (Index j = 0; j < 3; ++j) {
      for (double sign : {-1.0, 1.0}) {
        Vector beta = fit.coefficients;
        const double scale = std::max(1.0, std::abs(beta[j]));
        beta[j] += sign * 1e-4 * scale;
        double obj = 0.0;
        for (Index t = 0; t < y.size(); ++t)
          obj += check_loss(y[t] - x.row(t).dot(beta), tau);
        CHECK(obj >= fit.objective - 1e-8);
      }
    }
  }
}

TEST_CASE("subgradient condition at the optimum") {
  Rng rng(29);
  Matrix x(60, 2);
  x.col(0).setOnes();
  x.col(1) = rng.normal_vector(60);
  const Vector y = rng.normal_vector(60);
  const double tau = 0.3;
  const QuantileFit fit = fit_quantile(x, y, tau);
  const double active_tol = 1e-6 * (1.0 + y.cwiseAbs().maxCoeff());
  for (Index j = 0; j < x.cols(); ++j) {
    double grad = 0.0, active = 0.0;
    for (Index t = 0; t < y.size(); ++t) {
      if (std::abs(fit.residuals[t]) <= active_tol)
        active += std::abs(x(t, j));
      else
        grad += x(t, j) * quantile_score(fit.residuals[t], tau);
    }
    CHECK(std::abs(grad) <= active + 1e-6);
  }
}

TEST_CASE("negative residual count stays near tau*T") {
  Rng rng(31);
  for (int rep = 0; rep < 10; ++rep) {
    const Index n = 120;
    Matrix x(n, 3);
    x.col(0).setOnes();
    x.col(1) = rng.normal_vector(n);
    x.col(2) = rng.normal_vector(n);
    const Vector y = rng.normal_vector(n);
    const double tau = 0.1 + 0.8 * rng.uniform();
    const QuantileFit fit = fit_quantile(x, y, tau);
    int neg = 0;
    for (Index t = 0; t < n; ++t) neg += fit.residuals[t] < 0.0 ? 1 : 0;
    const double target = std::floor(tau * n);
    CHECK(std::abs(neg - target) <= 3.0);
  }
}

TEST_CASE("solver error paths") {
  Rng rng(37);
  Matrix x(20, 2);
  x.col(0) = rng.normal_vector(20);
  x.col(1) = 2.0 * x.col(0);  // collinear
  const Vector y = rng.normal_vector(20);
  CHECK_THROWS_AS(fit_quantile(x, y, 0.5), SingularDesignError);
  CHECK_THROWS_AS(fit_ols(x, y), SingularDesignError);

  Matrix ok(20, 2);
  ok.col(0).setOnes();
  ok.col(1) = rng.normal_vector(20);
  CHECK_THROWS_AS(fit_quantile(ok, y, 1.5), ParameterError);

  QrSolverOptions opts;
  opts.max_iterations = 1;
  try {
    fit_quantile(ok, y, 0.5, opts);
    CHECK(false);
  } catch (const ConvergenceError& e) {
    CHECK(e.best().residuals.size() == 20);
    CHECK(e.best().iterations == 1);
  }
}

TEST_CASE("ols mean case and exact fit") {
  Vector y(3);
  y << 2, 4, 6;
  const OlsFit fit = fit_ols(Matrix::Ones(3, 1), y);
  CHECK(fit.coefficients[0] == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(fit.residuals[0] == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(fit.residuals[2] == doctest::Approx(2.0).epsilon(1e-12));

  Rng rng(41);
  Matrix x(12, 3);
  x.col(0).setOnes();
  x.col(1) = rng.normal_vector(12);
  x.col(2) = rng.normal_vector(12);
  const Vector in_span = x * Vector::Constant(3, 1.7);
  CHECK(fit_ols(x, in_span).residuals.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("ols matches the normal equations and is orthogonal to the design") {
  Rng rng(43);
  Matrix x(10, 2);
  x.col(0).setOnes();
  x.col(1) = rng.normal_vector(10);
  const Vector y = rng.normal_vector(10);
  const OlsFit fit = fit_ols(x, y);
  const Vector direct = (x.transpose() * x).ldlt().solve(x.transpose() * y);
  CHECK((fit.coefficients - direct).cwiseAbs().maxCoeff() < 1e-10);
  for (Index j = 0; j < x.cols(); ++j) {
    const double dot = std::abs(x.col(j).dot(fit.residuals));
    CHECK(dot <= 1e-8 * x.col(j).norm() * (fit.residuals.norm() + 1e-12) + 1e-12);
  }
  CHECK(std::abs(fit.residuals.sum()) < 1e-10);  // intercept present
}

TEST_CASE("multi-response ols") {
  Rng rng(47);
  Matrix x(15, 2);
  x.col(0).setOnes();
  x.col(1) = rng.normal_vector(15);
  Matrix ys(15, 3);
  for (Index j = 0; j < 3; ++j) ys.col(j) = rng.normal_vector(15);
  const MultiOlsFit fit = fit_ols(x, ys);
  for (Index j = 0; j < 3; ++j) {
    const OlsFit single = fit_ols(x, Vector(ys.col(j)));
    CHECK((fit.coefficients.col(j) - single.coefficients).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK(((fit.fitted + fit.residuals) - ys).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("design matrix helpers") {
  Matrix x = Matrix::Random(6, 2);
  const DesignMatrix d = DesignMatrix::with_intercept(x);
  CHECK(d.has_intercept);
  CHECK(d.cols() == 3);
  CHECK(d.values.col(0).minCoeff() == 1.0);
  CHECK_THROWS_AS(fit_quantile(Matrix::Zero(6, 1), Vector::Ones(6), 0.5),
                  SingularDesignError);
}
