#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qrivx/rng.hpp"
#include "qrivx/types.hpp"

namespace qrivx {

// AR(1) roots for the predictor panel: rho_i = 1 + c_i/T (SD, local to
// unity), rho_i = 1 + c_i (WD, fixed |rho|<1), or rho_i given directly.
struct PersistenceSpec {
  enum class Kind { SD, WD, Direct };
  Kind kind = Kind::SD;
  Vector c;      // per-column c_i (SD/WD) or rho_i (Direct)
  std::string label;

  Vector rho(Index t_len) const;  // per-column AR coefficients
  void validate() const;

  static PersistenceSpec sd(double c_common, Index k);
  static PersistenceSpec wd(double c_common, Index k);
  static PersistenceSpec direct(Vector rho);
};

// v_{i,t} = gamma_i * zeta_t + vcheck_{i,t}, all N(0,1) building blocks
struct InnovationSpec {
  Vector gamma;
  std::uint64_t seed = 0;
};

struct ErrorSpec {
  enum class Kind { IID, GARCH };
  Kind kind = Kind::IID;
  double mu_sigma = 1.0;
  std::vector<double> arch_coeffs;   // a_i on u_{t-i}^2
  std::vector<double> garch_coeffs;  // b_j on sigma_{t-j}^2
  double tau_anchor = 0.5;           // tau at which u_{t,tau} has conditional quantile zero

  void validate() const;
  static ErrorSpec iid(double tau) { return ErrorSpec{Kind::IID, 1.0, {}, {}, tau}; }
};

struct Innovations {
  Vector zeta;  // T
  Matrix v;     // T x K
};

Innovations gen_innovations(const InnovationSpec& spec, Index t_len, Index k);

// x_{i,t} = rho_i x_{i,t-1} + v_{i,t}, x_{i,0} = 0; returns rows t = 1..T
Matrix gen_predictors(const PersistenceSpec& spec, const Matrix& v);

// y_t = mu_tau + x_{t-1}' beta_tau + sigma_t (zeta_t - Phi^{-1}(tau)); the
// conditional tau quantile of y_t given x_{t-1} is mu_tau + x_{t-1}' beta_tau
// by construction. x_lag row t must hold x_{t-1}.
Vector gen_response(const Matrix& x_lag, const Vector& beta_tau, double mu_tau,
                    const Vector& zeta, const ErrorSpec& err);

// Response plus lag-aligned regressors for one replication: y has length T
// and x_lag row t holds x_{t-1} (so row 0 is x_0 = 0).
struct SimulatedPanel {
  Vector y;
  Matrix x_lag;
};

SimulatedPanel simulate_panel(const PersistenceSpec& persistence,
                              const InnovationSpec& innovations,
                              const ErrorSpec& err, const Vector& beta_tau,
                              double mu_tau, Index t_len);

}  // namespace qrivx
