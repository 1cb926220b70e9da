#include "qrivx/dgp.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

#include "qrivx/distributions.hpp"

namespace qrivx {

Vector PersistenceSpec::rho(Index t_len) const {
  validate();
  Vector out(c.size());
  switch (kind) {
    case Kind::SD:
      out = Vector::Ones(c.size()) + c / static_cast<double>(t_len);
      for (Index i = 0; i < out.size(); ++i)
        if (out[i] <= -1.0)
          throw ParameterError("PersistenceSpec: c/T too negative for this sample size");
      break;
    case Kind::WD:
      out = Vector::Ones(c.size()) + c;
      break;
    case Kind::Direct:
      out = c;
      break;
  }
  return out;
}

void PersistenceSpec::validate() const {
  if (c.size() == 0) throw ParameterError("PersistenceSpec: empty coefficient vector");
  for (Index i = 0; i < c.size(); ++i) {
    switch (kind) {
      case Kind::SD:
        if (!(c[i] <= 0.0))
          throw ParameterError("PersistenceSpec: SD requires c <= 0");
        break;
      case Kind::WD:
        if (!(std::abs(1.0 + c[i]) < 1.0))
          throw ParameterError("PersistenceSpec: WD requires |1+c| < 1");
        break;
      case Kind::Direct:
        if (!(c[i] > 0.0 && c[i] <= 1.0))
          throw ParameterError("PersistenceSpec: direct rho requires 0 < rho <= 1");
        break;
    }
  }
}

namespace {
std::string label_of(const char* kind, double c) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%s(c=%g)", kind, c);
  return buf;
}
}  // namespace

PersistenceSpec PersistenceSpec::sd(double c_common, Index k) {
  PersistenceSpec s;
  s.kind = Kind::SD;
  s.c = Vector::Constant(k, c_common);
  s.label = label_of("SD", c_common);
  return s;
}

PersistenceSpec PersistenceSpec::wd(double c_common, Index k) {
  PersistenceSpec s;
  s.kind = Kind::WD;
  s.c = Vector::Constant(k, c_common);
  s.label = label_of("WD", c_common);
  return s;
}

PersistenceSpec PersistenceSpec::direct(Vector rho) {
  PersistenceSpec s;
  s.kind = Kind::Direct;
  s.c = std::move(rho);
  s.label = "rho";
  return s;
}

void ErrorSpec::validate() const {
  if (!(tau_anchor > 0.0 && tau_anchor < 1.0))
    throw ParameterError("ErrorSpec: tau_anchor must lie in (0,1)");
  if (kind == Kind::GARCH) {
    if (mu_sigma <= 0.0) throw ParameterError("ErrorSpec: mu_sigma must be positive");
    double total = 0.0;
    for (double a : arch_coeffs) {
      if (a < 0.0) throw ParameterError("ErrorSpec: negative ARCH coefficient");
      total += a;
    }
    for (double b : garch_coeffs) {
      if (b < 0.0) throw ParameterError("ErrorSpec: negative GARCH coefficient");
      total += b;
    }
    if (total >= 1.0)
      throw ParameterError("ErrorSpec: GARCH stationarity needs sum(a)+sum(b) < 1");
  }
}

Innovations gen_innovations(const InnovationSpec& spec, Index t_len, Index k) {
  if (spec.gamma.size() != k)
    throw ContractError("gen_innovations: gamma length must equal K");
  Rng rng(spec.seed);
  Innovations out;
  out.zeta.resize(t_len);
  out.v.resize(t_len, k);
  for (Index t = 0; t < t_len; ++t) {
    out.zeta[t] = rng.normal();
    for (Index i = 0; i < k; ++i)
      out.v(t, i) = spec.gamma[i] * out.zeta[t] + rng.normal();
  }
  return out;
}

Matrix gen_predictors(const PersistenceSpec& spec, const Matrix& v) {
  const Index t_len = v.rows();
  const Index k = v.cols();
  if (spec.c.size() != k)
    throw ContractError("gen_predictors: persistence dimension must equal K");
  const Vector rho = spec.rho(t_len);
  Matrix x(t_len, k);
  for (Index i = 0; i < k; ++i) {
    double prev = 0.0;  // x_{i,0} = 0
    for (Index t = 0; t < t_len; ++t) {
      prev = rho[i] * prev + v(t, i);
      x(t, i) = prev;
    }
  }
  return x;
}

Vector gen_response(const Matrix& x_lag, const Vector& beta_tau, double mu_tau,
                    const Vector& zeta, const ErrorSpec& err) {
  err.validate();
  const Index t_len = x_lag.rows();
  if (beta_tau.size() != x_lag.cols())
    throw ContractError("gen_response: beta length must equal K");
  if (zeta.size() != t_len)
    throw ContractError("gen_response: zeta length must equal T");

  const double q_zeta = dist::norm_quantile(err.tau_anchor);
  Vector y(t_len);

  if (err.kind == ErrorSpec::Kind::IID) {
    for (Index t = 0; t < t_len; ++t)
      y[t] = mu_tau + x_lag.row(t).dot(beta_tau) + (zeta[t] - q_zeta);
    return y;
  }

  // GARCH(q,r): sigma_t^2 = mu_sigma + sum a_i u_{t-i}^2 + sum b_j sigma_{t-j}^2,
  // pre-sample u^2 and sigma^2 start at the unconditional variance
  const double a_sum = std::accumulate(err.arch_coeffs.begin(), err.arch_coeffs.end(), 0.0);
  const double b_sum = std::accumulate(err.garch_coeffs.begin(), err.garch_coeffs.end(), 0.0);
  const double uncond = err.mu_sigma / (1.0 - a_sum - b_sum);
  std::vector<double> u2_hist(err.arch_coeffs.size(), uncond);
  std::vector<double> s2_hist(err.garch_coeffs.size(), uncond);

  for (Index t = 0; t < t_len; ++t) {
    double s2 = err.mu_sigma;
    for (std::size_t i = 0; i < u2_hist.size(); ++i) s2 += err.arch_coeffs[i] * u2_hist[i];
    for (std::size_t j = 0; j < s2_hist.size(); ++j) s2 += err.garch_coeffs[j] * s2_hist[j];
    const double sigma = std::sqrt(s2);
    const double u = sigma * zeta[t];
    y[t] = mu_tau + x_lag.row(t).dot(beta_tau) + (u - sigma * q_zeta);
    if (!u2_hist.empty()) {
      for (std::size_t i = u2_hist.size() - 1; i > 0; --i) u2_hist[i] = u2_hist[i - 1];
      u2_hist[0] = u * u;
    }
    if (!s2_hist.empty()) {
      for (std::size_t j = s2_hist.size() - 1; j > 0; --j) s2_hist[j] = s2_hist[j - 1];
      s2_hist[0] = s2;
    }
  }
  return y;
}

SimulatedPanel simulate_panel(const PersistenceSpec& persistence,
                              const InnovationSpec& innovations,
                              const ErrorSpec& err, const Vector& beta_tau,
                              double mu_tau, Index t_len) {
  const Index k = innovations.gamma.size();
  Innovations innov = gen_innovations(innovations, t_len, k);
  const Matrix x = gen_predictors(persistence, innov.v);

  SimulatedPanel panel;
  panel.x_lag.setZero(t_len, k);
  panel.x_lag.bottomRows(t_len - 1) = x.topRows(t_len - 1);  // row t is x_{t-1}, x_0 = 0
  panel.y = gen_response(panel.x_lag, beta_tau, mu_tau, innov.zeta, err);
  return panel;
}

}  // namespace qrivx
