#include "qrivx/stats.hpp"

#include <Eigen/LU>
#include <cmath>
#include <limits>

#include "qrivx/distributions.hpp"
#include "qrivx/qr_solver.hpp"

namespace qrivx {

namespace {

constexpr double kClamp = 1e300;

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

Matrix demeaned(const Matrix& x) { return x.rowwise() - x.colwise().mean(); }

Matrix invert_or(const Matrix& m, const char* what) {
  Eigen::FullPivLU<Matrix> lu(m);
  if (!lu.isInvertible()) {
    if (std::string(what).find("instrument") != std::string::npos)
      throw WeakInstrumentError(std::string("singular ") + what);
    throw SingularDesignError(std::string("singular ") + what);
  }
  return lu.inverse();
}

double tail_p(double stat, Index df, Side side) {
  switch (side) {
    case Side::TwoSided:
      return dist::chi2_sf(stat, static_cast<double>(df));
    case Side::Right:
      return dist::norm_sf(stat);
    case Side::Left:
      return dist::norm_cdf(stat);
  }
  return 1.0;
}

// Wald form for two-sided, t form for one-sided hypotheses
TestResult make_test(const Vector& beta, const Matrix& avar, const Hypothesis& hyp,
                     StatKind wald_kind, StatKind t_kind) {
  const Index j = hyp.restrictions();
  TestResult res;
  res.side = hyp.side;
  res.df = j;
  res.beta_used = hyp.r_mat * beta;
  res.avar_used = symmetrized(hyp.r_mat * avar * hyp.r_mat.transpose());
  const Vector dev = res.beta_used - hyp.r_vec;

  if (hyp.side == Side::TwoSided) {
    res.kind = wald_kind;
    const Matrix inv = invert_or(res.avar_used, "restricted variance");
    res.statistic = dev.dot(inv * dev);
    res.p_value = tail_p(res.statistic, j, Side::TwoSided);
  } else {
    if (j != 1) throw ContractError("one-sided tests need a single restriction");
    res.kind = t_kind;
    const double v = res.avar_used(0, 0);
    if (!(v > 0.0)) throw WeakInstrumentError("non-positive restricted variance");
    res.statistic = dev[0] / std::sqrt(v);
    res.p_value = tail_p(res.statistic, 1, hyp.side);
  }
  return res;
}

// (|base|)^(1/(1-delta)) carrying the sign, clamped against overflow
double power_transform(double base, double delta, bool& overflowed) {
  const double expo = 1.0 / (1.0 - delta);
  const double mag = std::abs(base);
  if (mag == 0.0) return 0.0;
  const double log_mag = expo * std::log(mag);
  if (log_mag > std::log(kClamp)) {
    overflowed = true;
    return base > 0.0 ? kClamp : -kClamp;
  }
  const double val = std::exp(log_mag);
  return base > 0.0 ? val : -val;
}

}  // namespace

void Hypothesis::validate(Index k) const {
  if (r_mat.cols() != k) throw ContractError("Hypothesis: R has wrong column count");
  if (r_vec.size() != r_mat.rows()) throw ContractError("Hypothesis: r has wrong length");
  const Index j = r_mat.rows();
  if (j < 1 || j > k) throw ContractError("Hypothesis: need 1 <= J <= K");
  Eigen::FullPivLU<Matrix> lu(r_mat);
  if (lu.rank() < j) throw ContractError("Hypothesis: R must have full row rank");
  if (side != Side::TwoSided && j != 1)
    throw ContractError("Hypothesis: one-sided tests need J = 1");
}

Hypothesis Hypothesis::joint(Index k) {
  return Hypothesis{Matrix::Identity(k, k), Vector::Zero(k), Side::TwoSided};
}

Hypothesis Hypothesis::marginal(Index i, Index k, Side side) {
  Matrix r = Matrix::Zero(1, k);
  r(0, i) = 1.0;
  return Hypothesis{std::move(r), Vector::Zero(1), side};
}

std::string to_string(StatKind kind) {
  switch (kind) {
    case StatKind::Qo: return "Qo";
    case StatKind::Qivx: return "Qivx";
    case StatKind::Ql: return "Ql";
    case StatKind::Qm: return "Qm";
    case StatKind::tQo: return "tQo";
    case StatKind::tQivx: return "tQivx";
    case StatKind::tQl: return "tQl";
    case StatKind::tQm: return "tQm";
  }
  return "?";
}

Matrix avar_split(const Matrix& z_tilde, const Matrix& x_lag, double f_hat, double tau) {
  if (z_tilde.rows() != x_lag.rows() || z_tilde.cols() != x_lag.cols())
    throw ContractError("avar_split: shapes differ");
  const Matrix zx = z_tilde.transpose() * x_lag;
  const Matrix zz = tau * (1.0 - tau) * (z_tilde.transpose() * z_tilde);
  const Matrix zx_inv = invert_or(zx, "instrument-predictor cross moment");
  return symmetrized(zx_inv * zz * zx_inv.transpose() / (f_hat * f_hat));
}

Matrix avar_conventional(const Matrix& x_lag, double f_hat, double tau) {
  const Matrix xb = demeaned(x_lag);
  const Matrix gram = xb.transpose() * xb;
  const Matrix inv = invert_or(gram, "predictor Gram matrix");
  return symmetrized(tau * (1.0 - tau) * inv / (f_hat * f_hat));
}

Matrix avar_ivx(const Matrix& z, const Matrix& x_lag, double f_hat, double tau) {
  const Matrix zb = demeaned(z);
  const Matrix zx = zb.transpose() * x_lag;
  const Matrix zz = tau * (1.0 - tau) * (zb.transpose() * zb);
  const Matrix zx_inv = invert_or(zx, "instrument-predictor cross moment");
  return symmetrized(zx_inv * zz * zx_inv.transpose() / (f_hat * f_hat));
}

TauContext analyze_tau(const Vector& y, const Matrix& x_lag, const InstrumentSet& iv,
                       double tau, double f_hat, double delta,
                       const AnalyzeOptions& opts) {
  if (!(f_hat > 0.0)) throw ParameterError("analyze_tau: f_hat must be positive");
  TauContext ctx;
  ctx.tau = tau;
  ctx.delta = delta;
  ctx.t_len = y.size();
  ctx.f_hat = f_hat;

  ctx.split_fit = two_step_estimate(y, x_lag, iv.z_tilde, tau);
  ctx.avar_split_mat = avar_split(iv.z_tilde, x_lag, f_hat, tau);

  const QuantileFit conv =
      fit_quantile(DesignMatrix::with_intercept(x_lag), y, tau);
  ctx.beta_conv = conv.coefficients.tail(x_lag.cols());
  ctx.avar_conv_mat = avar_conventional(x_lag, f_hat, tau);

  if (opts.with_ivx) {
    ctx.ivx_fit = two_step_estimate(y, x_lag, iv.z, tau);
    ctx.avar_ivx_mat = avar_ivx(iv.z, x_lag, f_hat, tau);
  }
  return ctx;
}

TauContext analyze_tau(const Vector& y, const Matrix& x_lag, const InstrumentSet& iv,
                       double tau, const DensityConfig& density_cfg, double delta,
                       const AnalyzeOptions& opts) {
  const double f_hat = estimate_density_at_zero(y, x_lag, tau, density_cfg);
  return analyze_tau(y, x_lag, iv, tau, f_hat, delta, opts);
}

TestResult q_l(const TauContext& ctx, const Hypothesis& hyp) {
  hyp.validate(ctx.split_fit.beta_hat.size());
  return make_test(ctx.split_fit.beta_hat, ctx.avar_split_mat, hyp, StatKind::Ql,
                   StatKind::tQl);
}

TestResult q_o(const TauContext& ctx, const Hypothesis& hyp) {
  hyp.validate(ctx.beta_conv.size());
  return make_test(ctx.beta_conv, ctx.avar_conv_mat, hyp, StatKind::Qo, StatKind::tQo);
}

TestResult q_ivx(const TauContext& ctx, const Hypothesis& hyp) {
  if (!ctx.ivx_fit || !ctx.avar_ivx_mat)
    throw ContractError("q_ivx: context was built without the raw-instrument fit");
  hyp.validate(ctx.ivx_fit->beta_hat.size());
  return make_test(ctx.ivx_fit->beta_hat, *ctx.avar_ivx_mat, hyp, StatKind::Qivx,
                   StatKind::tQivx);
}

TestResult q_m(const TestResult& ql, const TestResult& qo, Index t_len, double delta) {
  const bool wald = ql.side == Side::TwoSided;
  if ((qo.side == Side::TwoSided) != wald || ql.df != qo.df)
    throw ContractError("q_m: component statistics do not match");
  if ((wald && (ql.kind != StatKind::Ql || qo.kind != StatKind::Qo)) ||
      (!wald && (ql.kind != StatKind::tQl || qo.kind != StatKind::tQo)))
    throw ContractError("q_m: expected a (Ql, Qo) pair of the same form");

  TestResult res = ql;
  res.kind = wald ? StatKind::Qm : StatKind::tQm;
  const double root_t = std::sqrt(static_cast<double>(t_len));

  if (wald) {
    const double q999 = dist::chi2_quantile(0.999, static_cast<double>(ql.df));
    bool flag = false;
    const double addon = power_transform(qo.statistic / q999, delta, flag);
    res.statistic = ql.statistic + addon / root_t;
    res.overflowed = flag;
    res.p_value = tail_p(res.statistic, res.df, Side::TwoSided);
  } else {
    const double q999 = dist::norm_quantile(0.999);
    bool flag = false;
    const double addon = power_transform(qo.statistic / q999, delta, flag);
    res.statistic = ql.statistic + addon / root_t;
    res.overflowed = flag;
    res.p_value = tail_p(res.statistic, 1, ql.side);
  }
  return res;
}

TestResult q_m(const TauContext& ctx, const Hypothesis& hyp) {
  return q_m(q_l(ctx, hyp), q_o(ctx, hyp), ctx.t_len, ctx.delta);
}

TestResult q_l(const Vector& y, const Matrix& x_lag, const InstrumentSet& iv,
               double tau, const Hypothesis& hyp, double f_hat) {
  return q_l(analyze_tau(y, x_lag, iv, tau, f_hat, 0.95), hyp);
}

TestResult q_o(const Vector& y, const Matrix& x_lag, double tau,
               const Hypothesis& hyp, double f_hat) {
  hyp.validate(x_lag.cols());
  const QuantileFit conv = fit_quantile(DesignMatrix::with_intercept(x_lag), y, tau);
  const Vector beta = conv.coefficients.tail(x_lag.cols());
  return make_test(beta, avar_conventional(x_lag, f_hat, tau), hyp, StatKind::Qo,
                   StatKind::tQo);
}

TestResult q_ivx(const Vector& y, const Matrix& x_lag, const Matrix& z_raw,
                 double tau, const Hypothesis& hyp, double f_hat) {
  hyp.validate(x_lag.cols());
  const TwoStepFit fit = two_step_estimate(y, x_lag, z_raw, tau);
  return make_test(fit.beta_hat, avar_ivx(z_raw, x_lag, f_hat, tau), hyp,
                   StatKind::Qivx, StatKind::tQivx);
}

namespace {

// innovations recovered from the instrument recursion itself
Vector recovered_innovations(const Matrix& z_lag, double rho_z) {
  const Index t_len = z_lag.rows();
  Vector v(t_len - 1);
  for (Index t = 1; t < t_len; ++t) v[t - 1] = z_lag(t, 0) - rho_z * z_lag(t - 1, 0);
  return v;
}

double rho_v_psi_estimate(const Vector& v, const Vector& psi, double tau) {
  const Index n = v.size();
  double cov = 0.0, vv = 0.0;
  for (Index t = 0; t < n; ++t) {
    cov += v[t] * psi[t];
    vv += v[t] * v[t];
  }
  cov /= static_cast<double>(n);
  vv /= static_cast<double>(n);
  return cov / std::sqrt(vv) / std::sqrt(tau * (1.0 - tau));
}

}  // namespace

HigherOrderDiag higher_order_diag_raw(const Matrix& z_lag, const Vector& psi,
                                      double tau, double c_z, double delta) {
  if (z_lag.cols() != 1) throw ContractError("higher_order_diag: univariate only");
  if (z_lag.rows() != psi.size()) throw ContractError("higher_order_diag: shapes differ");
  const double t_len = static_cast<double>(z_lag.rows());
  const double rho_z = 1.0 + c_z / std::pow(t_len, delta);

  const Vector v = recovered_innovations(z_lag, rho_z);
  const double omega_vv = v.squaredNorm() / static_cast<double>(v.size());
  const double omega_zz = tau * (1.0 - tau) * omega_vv / (-2.0 * c_z);

  const double scale = std::pow(t_len, 1.0 + delta);
  const double gram = z_lag.col(0).squaredNorm() / scale;
  const double score = z_lag.col(0).dot(psi);

  HigherOrderDiag d;
  d.z_t = score / std::sqrt(scale * omega_zz);
  d.varpi = -0.5 * (tau * (1.0 - tau) * gram / omega_zz - 1.0);
  d.b_t = d.varpi * d.z_t;
  d.c_t = (z_lag.col(0).sum() / std::pow(t_len, 0.5 + delta)) * psi.sum() /
          std::sqrt(t_len) / std::sqrt(tau * (1.0 - tau) * gram);
  d.rho_v_psi = rho_v_psi_estimate(v, psi.head(v.size()), tau);
  return d;
}

HigherOrderDiag higher_order_diag_split(const InstrumentSet& iv, const Vector& psi,
                                        double tau, double c_z, double delta,
                                        double lambda) {
  if (iv.z.cols() != 1) throw ContractError("higher_order_diag: univariate only");
  if (iv.z.rows() != psi.size()) throw ContractError("higher_order_diag: shapes differ");
  const double t_len = static_cast<double>(iv.z.rows());
  const double rho_z = 1.0 + c_z / std::pow(t_len, delta);

  const Vector v = recovered_innovations(iv.z, rho_z);
  const double omega_vv = v.squaredNorm() / static_cast<double>(v.size());
  const double omega_zz = tau * (1.0 - tau) * omega_vv / (-2.0 * c_z);
  const double s_a = iv.s_a(0, 0);
  const double s_b = iv.s_b(0, 0);
  const double scale = std::pow(t_len, 1.0 + delta);
  const double sigma_zz =
      scale * omega_zz *
      (lambda * (1.0 - s_a) * (1.0 - s_a) + (1.0 - lambda) * (1.0 - s_b) * (1.0 - s_b));

  const auto& zt = iv.z_tilde.col(0);
  const double gram_tilde = zt.squaredNorm();

  HigherOrderDiag d;
  d.z_t = zt.dot(psi) / std::sqrt(sigma_zz);
  d.varpi = -0.5 * (tau * (1.0 - tau) * gram_tilde / sigma_zz - 1.0);
  d.b_t = d.varpi * d.z_t;
  d.c_t = (zt.sum() / std::pow(t_len, 0.5 + delta)) * psi.sum() / std::sqrt(t_len) /
          std::sqrt(tau * (1.0 - tau) * gram_tilde / scale);
  d.rho_v_psi = rho_v_psi_estimate(v, psi.head(v.size()), tau);

  // weighted-block factors of the split bias decomposition
  const Index t0 = iv.t0;
  double num = 0.0, blk_a = 0.0, blk_b = 0.0;
  for (Index t = 0; t < iv.z.rows(); ++t) {
    const double p2 = psi[t] * psi[t];
    num += zt[t] * zt[t] * p2;
    const double raw = iv.z(t, 0);
    if (t < t0)
      blk_a += raw * raw * p2;
    else
      blk_b += raw * raw * p2;
  }
  num /= scale;
  blk_a /= scale;
  blk_b /= scale;
  if (num > 0.0) {
    d.w_a = (1.0 - s_a) * std::sqrt(blk_a / num);
    d.w_b = (1.0 - s_b) * std::sqrt(blk_b / num);
    d.w_l = d.w_a / std::sqrt(lambda) + d.w_b / std::sqrt(1.0 - lambda);
  }
  return d;
}

}  // namespace qrivx
