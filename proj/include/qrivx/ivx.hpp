#pragma once

#include "qrivx/qr_solver.hpp"
#include "qrivx/types.hpp"

namespace qrivx {

// Tuning of the mildly integrated instrument z_t = rho_z z_{t-1} + dx_t with
// rho_z = 1 + c_z / T^delta. The default c_z = -8 - 2K is deliberately
// conservative; lambda is the sample-split fraction.
struct InstrumentConfig {
  double c_z;
  double delta = 0.95;
  double lambda = 0.5;

  explicit InstrumentConfig(Index k) : c_z(-8.0 - 2.0 * static_cast<double>(k)) {}
  InstrumentConfig(double c_z_, double delta_, double lambda_)
      : c_z(c_z_), delta(delta_), lambda(lambda_) {}

  void validate() const;
};

// Raw instrument plus its block-demeaned version. The first T0 rows of
// z_tilde are (I - S_a) z, the rest (I - S_b) z, which makes sum_t z_tilde
// exactly zero.
struct InstrumentSet {
  Matrix z;        // T x K
  Matrix z_tilde;  // T x K
  Index t0 = 0;    // split row count, floor(lambda * T)
  Matrix s_a;      // K x K
  Matrix s_b;      // K x K
};

// Builds z along the rows of the lag-aligned predictor matrix (row t holds
// x_{t-1}); differences are taken within the matrix and z starts at zero.
Matrix build_instrument(const Matrix& x_lag, const InstrumentConfig& cfg);

InstrumentSet split_demean(const Matrix& z, double lambda);

// build + split in one call
InstrumentSet make_instruments(const Matrix& x_lag, const InstrumentConfig& cfg);

// Output of the two-step regression: OLS of x on (1, instrument) splits the
// predictors into x_fitted + v_resid, then the quantile regression of y on
// (1, x_fitted, v_resid) yields the instrumented coefficient vector.
struct TwoStepFit {
  Vector beta_hat;   // K, coefficients on x_fitted
  Vector gamma_hat;  // K, coefficients on v_resid
  double mu_hat = 0.0;
  Matrix x_fitted;   // T x K
  Matrix v_resid;    // T x K
  QuantileFit fit;   // the step-2 quantile fit
};

TwoStepFit two_step_estimate(const Vector& y, const Matrix& x_lag,
                             const Matrix& instrument, double tau);

}  // namespace qrivx
