#pragma once

#include <optional>
#include <string>

#include "qrivx/density.hpp"
#include "qrivx/ivx.hpp"
#include "qrivx/types.hpp"

namespace qrivx {

enum class Side { TwoSided, Right, Left };

// Null hypothesis R beta = r with J = rows(R) restrictions. One-sided tests
// need J = 1.
struct Hypothesis {
  Matrix r_mat;  // J x K
  Vector r_vec;  // J
  Side side = Side::TwoSided;

  Index restrictions() const { return r_mat.rows(); }
  void validate(Index k) const;

  static Hypothesis joint(Index k);
  static Hypothesis marginal(Index i, Index k, Side side = Side::TwoSided);
};

enum class StatKind { Qo, Qivx, Ql, Qm, tQo, tQivx, tQl, tQm };

std::string to_string(StatKind kind);

struct TestResult {
  double statistic = 0.0;
  Index df = 1;
  double p_value = 1.0;
  StatKind kind = StatKind::Ql;
  Side side = Side::TwoSided;
  Vector beta_used;   // R beta_hat
  Matrix avar_used;   // R Avar R'
  bool overflowed = false;  // power transform clamped in q_m
};

// Sandwich variance of the sample-split IV estimator:
//   f^{-2} (sum z~ x')^{-1} [tau(1-tau) sum z~ z~'] (sum x z~')^{-1}
Matrix avar_split(const Matrix& z_tilde, const Matrix& x_lag, double f_hat, double tau);

// Conventional estimator variance f^{-2} tau(1-tau) (sum xbar xbar')^{-1}
Matrix avar_conventional(const Matrix& x_lag, double f_hat, double tau);

// Raw-instrument variance with demeaned z in both factors of the sandwich
Matrix avar_ivx(const Matrix& z, const Matrix& x_lag, double f_hat, double tau);

// Everything at one quantile level that the statistics share: the density
// estimate, the split and conventional fits and their variance matrices.
// Building it once lets joint and marginal tests reuse the same fits.
struct TauContext {
  double tau = 0.5;
  double delta = 0.95;
  Index t_len = 0;
  double f_hat = 0.0;
  TwoStepFit split_fit;
  Vector beta_conv;
  Matrix avar_split_mat;
  Matrix avar_conv_mat;
  std::optional<TwoStepFit> ivx_fit;      // raw-instrument two-step (diagnostic)
  std::optional<Matrix> avar_ivx_mat;
};

struct AnalyzeOptions {
  bool with_ivx = false;  // also fit the raw-instrument baseline
};

TauContext analyze_tau(const Vector& y, const Matrix& x_lag, const InstrumentSet& iv,
                       double tau, double f_hat, double delta,
                       const AnalyzeOptions& opts = {});

// density estimated internally with cfg
TauContext analyze_tau(const Vector& y, const Matrix& x_lag, const InstrumentSet& iv,
                       double tau, const DensityConfig& density_cfg, double delta,
                       const AnalyzeOptions& opts = {});

TestResult q_l(const TauContext& ctx, const Hypothesis& hyp);
TestResult q_o(const TauContext& ctx, const Hypothesis& hyp);
TestResult q_ivx(const TauContext& ctx, const Hypothesis& hyp);

// Linear-combination statistic: the split statistic plus a sqrt(T)-vanishing
// power transform of the conventional one. ql and qo must come from the same
// hypothesis and sample.
TestResult q_m(const TestResult& ql, const TestResult& qo, Index t_len, double delta);
TestResult q_m(const TauContext& ctx, const Hypothesis& hyp);

// Spec-level one-shot entry points (refit everything per call).
TestResult q_l(const Vector& y, const Matrix& x_lag, const InstrumentSet& iv,
               double tau, const Hypothesis& hyp, double f_hat);
TestResult q_o(const Vector& y, const Matrix& x_lag, double tau,
               const Hypothesis& hyp, double f_hat);
TestResult q_ivx(const Vector& y, const Matrix& x_lag, const Matrix& z_raw,
                 double tau, const Hypothesis& hyp, double f_hat);

// Finite-sample bias terms of the univariate statistics (K = 1 only).
struct HigherOrderDiag {
  double z_t = 0.0;      // self-normalized score term
  double varpi = 0.0;    // denominator-numerator correlation weight
  double b_t = 0.0;      // varpi * z_t
  double c_t = 0.0;      // slow-mean term; identically ~0 for split instruments
  double rho_v_psi = 0.0;
  double w_a = 0.0, w_b = 0.0, w_l = 0.0;  // split variant only
};

HigherOrderDiag higher_order_diag_raw(const Matrix& z_lag, const Vector& psi,
                                      double tau, double c_z, double delta);
HigherOrderDiag higher_order_diag_split(const InstrumentSet& iv, const Vector& psi,
                                        double tau, double c_z, double delta,
                                        double lambda);

}  // namespace qrivx
