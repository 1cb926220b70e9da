#pragma once

#include "qrivx/types.hpp"

namespace qrivx {

// rho_tau(u) = u * (tau - 1{u<0}); the loss minimized by quantile regression
double check_loss(double u, double tau);

// psi_tau(u) = tau - 1{u<0}
inline double quantile_score(double u, double tau) {
  return tau - (u < 0.0 ? 1.0 : 0.0);
}

// Regressor matrix wrapper that carries the intercept convention and
// validates shape. The solvers below accept plain matrices; nothing is ever
// inserted implicitly.
struct DesignMatrix {
  Matrix values;
  bool has_intercept = false;

  Index rows() const { return values.rows(); }
  Index cols() const { return values.cols(); }

  static DesignMatrix raw(Matrix x);
  // prepends a column of ones
  static DesignMatrix with_intercept(const Matrix& x);
};

struct QuantileFit {
  double tau = 0.5;
  Vector coefficients;
  Vector residuals;
  double objective = 0.0;
  int iterations = 0;
};

struct OlsFit {
  Vector coefficients;
  Vector fitted;
  Vector residuals;
};

// one OLS pass over several response columns sharing the design
struct MultiOlsFit {
  Matrix coefficients;  // p x m
  Matrix fitted;        // T x m
  Matrix residuals;     // T x m
};

// Thrown when the interior point hits its iteration cap; carries the best
// iterate so callers can decide whether it is usable.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& msg, QuantileFit best)
      : Error(msg), best_(std::move(best)) {}
  const QuantileFit& best() const { return best_; }

 private:
  QuantileFit best_;
};

struct QrSolverOptions {
  double gap_tolerance = 1e-8;  // relative duality gap
  int max_iterations = 200;
  double step_factor = 0.99995;
};

// Minimizes sum_t rho_tau(y_t - x_t' b) by a Frisch-Newton primal-dual
// interior point on the dual LP  max y'a  s.t.  X'a = (1-tau) X'1, a in [0,1]^T.
QuantileFit fit_quantile(const Matrix& x, const Vector& y, double tau,
                         const QrSolverOptions& opts = {});
QuantileFit fit_quantile(const DesignMatrix& x, const Vector& y, double tau,
                         const QrSolverOptions& opts = {});

OlsFit fit_ols(const Matrix& x, const Vector& y);
OlsFit fit_ols(const DesignMatrix& x, const Vector& y);
MultiOlsFit fit_ols(const Matrix& x, const Matrix& ys);

}  // namespace qrivx
