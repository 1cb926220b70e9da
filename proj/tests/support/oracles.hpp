#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "qrivx/qr_solver.hpp"
#include "qrivx/rng.hpp"

// Test-side oracles, independent of the implementation paths they check.
namespace qrivx::testing {

// Exact minimum of the check loss over linear models, found by enumerating
// every p-point interpolation (an optimal LP vertex always passes through p
// observations when the design has full rank). Exponential in p; meant for
// p <= 3, T <= 50.
inline double lp_quantile_objective(const Matrix& x, const Vector& y, double tau) {
  const Index n = x.rows();
  const Index p = x.cols();
  std::vector<Index> idx(p);
  for (Index j = 0; j < p; ++j) idx[j] = j;

  double best = std::numeric_limits<double>::infinity();
  Matrix sub(p, p);
  Vector rhs(p);
  for (;;) {
    for (Index j = 0; j < p; ++j) {
      sub.row(j) = x.row(idx[j]);
      rhs[j] = y[idx[j]];
    }
    Eigen::FullPivLU<Matrix> lu(sub);
    if (lu.isInvertible()) {
      const Vector beta = lu.solve(rhs);
      double obj = 0.0;
      for (Index t = 0; t < n; ++t) obj += check_loss(y[t] - x.row(t).dot(beta), tau);
      best = std::min(best, obj);
    }
    // next combination
    Index j = p;
    while (j-- > 0) {
      if (idx[j] < n - (p - j)) {
        ++idx[j];
        for (Index l = j + 1; l < p; ++l) idx[l] = idx[l - 1] + 1;
        break;
      }
      if (j == 0) return best;
    }
  }
}

// Kolmogorov-Smirnov statistic of a sample against a continuous CDF.
template <typename Cdf>
double ks_statistic(std::vector<double> sample, Cdf cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, std::abs((i + 1) / n - f));
    d = std::max(d, std::abs(i / n - f));
  }
  return d;
}

// asymptotic critical value of the KS statistic
inline double ks_critical(double alpha, std::size_t n) {
  // K(x) = 1 - 2 sum (-1)^{k-1} exp(-2 k^2 x^2); inverted for the usual levels
  double c = 1.6276;  // alpha = 0.01
  if (alpha >= 0.05) c = 1.3581;
  if (alpha >= 0.10) c = 1.2238;
  return c / std::sqrt(static_cast<double>(n));
}

inline Matrix random_matrix(Rng& rng, Index rows, Index cols) {
  return rng.normal_matrix(rows, cols);
}

}  // namespace qrivx::testing
