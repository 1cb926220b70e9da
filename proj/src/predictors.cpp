#include "qrivx/predictors.hpp"

#include "qrivx/qr_solver.hpp"

namespace qrivx {

Vector construct_trend(const Vector& series, double w) {
  if (!(w > 0.0 && w < 1.0)) throw ParameterError("construct_trend: w must lie in (0,1)");
  const Index n = series.size();
  Vector out = Vector::Zero(n);
  for (Index t = 1; t < n; ++t) out[t] = w * (out[t - 1] + (1.0 - w) * series[t - 1]);
  return out;
}

Vector construct_cp(const Matrix& forward_rates, const Vector& avg_rx) {
  if (forward_rates.rows() != avg_rx.size())
    throw ContractError("construct_cp: forwards and returns must be aligned");
  const OlsFit fit =
      fit_ols(DesignMatrix::with_intercept(forward_rates), avg_rx);
  return fit.fitted;
}

Vector ar1_coefficients(const Matrix& series) {
  const Index n = series.rows();
  if (n < 3) throw ContractError("ar1_coefficients: series too short");
  Vector out(series.cols());
  Matrix design(n - 1, 2);
  design.col(0).setOnes();
  for (Index j = 0; j < series.cols(); ++j) {
    design.col(1) = series.col(j).head(n - 1);
    const OlsFit fit = fit_ols(design, Vector(series.col(j).tail(n - 1)));
    out[j] = fit.coefficients[1];
  }
  return out;
}

}  // namespace qrivx
