#include "qrivx/ivx.hpp"

#include <cmath>
#include <vector>

namespace qrivx {

void InstrumentConfig::validate() const {
  if (!(c_z < 0.0)) throw ParameterError("InstrumentConfig: c_z must be negative");
  if (!(delta > 0.5 && delta < 1.0))
    throw ParameterError("InstrumentConfig: delta must lie in (1/2, 1)");
  if (!(lambda > 0.0 && lambda < 1.0))
    throw ParameterError("InstrumentConfig: lambda must lie in (0, 1)");
}

Matrix build_instrument(const Matrix& x_lag, const InstrumentConfig& cfg) {
  cfg.validate();
  const Index t_len = x_lag.rows();
  const Index k = x_lag.cols();
  if (t_len < 2) throw ContractError("build_instrument: need at least two rows");

  const double rho_z = 1.0 + cfg.c_z / std::pow(static_cast<double>(t_len), cfg.delta);
  Matrix z(t_len, k);
  z.row(0).setZero();  // first difference is unobservable there
  for (Index t = 1; t < t_len; ++t)
    z.row(t) = rho_z * z.row(t - 1) + (x_lag.row(t) - x_lag.row(t - 1));
  return z;
}

InstrumentSet split_demean(const Matrix& z, double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0))
    throw ParameterError("split_demean: lambda must lie in (0, 1)");
  const Index t_len = z.rows();
  const Index k = z.cols();
  const Index t0 = static_cast<Index>(std::floor(lambda * static_cast<double>(t_len)));
  if (t0 < k + 1 || t_len - t0 < k + 1)
    throw ContractError("split_demean: blocks too short for the projections");

  const Vector mean_full = z.colwise().mean();
  const Vector mean_a = z.topRows(t0).colwise().mean();
  const Vector mean_b = z.bottomRows(t_len - t0).colwise().mean();

  const double scale = z.rowwise().squaredNorm().mean();
  const double na = mean_a.squaredNorm();
  const double nb = mean_b.squaredNorm();
  if (!(na > 1e-24 * scale) || !(nb > 1e-24 * scale))
    throw DegenerateSplitError("split_demean: block mean of the instrument is numerically zero");

  InstrumentSet set;
  set.z = z;
  set.t0 = t0;
  set.s_a = mean_full * mean_a.transpose() / na;
  set.s_b = mean_full * mean_b.transpose() / nb;

  set.z_tilde.resize(t_len, k);
  set.z_tilde.topRows(t0) =
      z.topRows(t0) - z.topRows(t0) * set.s_a.transpose();
  set.z_tilde.bottomRows(t_len - t0) =
      z.bottomRows(t_len - t0) - z.bottomRows(t_len - t0) * set.s_b.transpose();
  return set;
}

InstrumentSet make_instruments(const Matrix& x_lag, const InstrumentConfig& cfg) {
  return split_demean(build_instrument(x_lag, cfg), cfg.lambda);
}

TwoStepFit two_step_estimate(const Vector& y, const Matrix& x_lag,
                             const Matrix& instrument, double tau) {
  const Index t_len = x_lag.rows();
  const Index k = x_lag.cols();
  if (instrument.rows() != t_len || instrument.cols() != k)
    throw ContractError("two_step_estimate: instrument and predictors must be conformable");

  TwoStepFit out;

  // step 1: OLS of each predictor column on (1, instrument)
  const MultiOlsFit step1 =
      fit_ols(DesignMatrix::with_intercept(instrument).values, x_lag);
  out.x_fitted = step1.fitted;
  out.v_resid = step1.residuals;

  // step 2: quantile regression of y on (1, x_fitted, v_resid). Columns of
  // v_resid that vanish (perfect instrument) carry no information and are
  // dropped; their gamma is reported as zero.
  std::vector<Index> kept;
  kept.reserve(k);
  for (Index j = 0; j < k; ++j) {
    const double vn = out.v_resid.col(j).norm();
    const double xn = x_lag.col(j).norm();
    if (vn > 1e-12 * (xn > 0.0 ? xn : 1.0)) kept.push_back(j);
  }

  Matrix design(t_len, 1 + k + static_cast<Index>(kept.size()));
  design.col(0).setOnes();
  design.middleCols(1, k) = out.x_fitted;
  for (std::size_t j = 0; j < kept.size(); ++j)
    design.col(1 + k + static_cast<Index>(j)) = out.v_resid.col(kept[j]);

  out.fit = fit_quantile(design, y, tau);
  out.mu_hat = out.fit.coefficients[0];
  out.beta_hat = out.fit.coefficients.segment(1, k);
  out.gamma_hat = Vector::Zero(k);
  for (std::size_t j = 0; j < kept.size(); ++j)
    out.gamma_hat[kept[j]] = out.fit.coefficients[1 + k + static_cast<Index>(j)];
  return out;
}

}  // namespace qrivx
