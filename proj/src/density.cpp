#include "qrivx/density.hpp"

#include <cmath>
#include <string>

#include "qrivx/qr_solver.hpp"
#include "qrivx/rng.hpp"

namespace qrivx {

void DensityConfig::validate() const {
  if (m1 < 1 || m2 < 1) throw ParameterError("DensityConfig: M1 and M2 must be >= 1");
}

double estimate_density_at_zero(const Vector& y, const Matrix& x_lag, double tau,
                                const DensityConfig& cfg) {
  cfg.validate();
  if (!(tau > 0.0 && tau < 1.0))
    throw ParameterError("estimate_density_at_zero: tau must lie in (0,1)");
  const Index t_len = y.size();
  const Index k = x_lag.cols();
  if (k > 0 && x_lag.rows() != t_len)
    throw ContractError("estimate_density_at_zero: y and x must be aligned");

  const Index p = 1 + k + cfg.m2;
  Matrix design(t_len, p);
  design.col(0).setOnes();
  if (k > 0) design.middleCols(1, k) = x_lag;

  Rng root(cfg.seed);
  double sum_sq = 0.0;
  for (int i = 0; i < cfg.m1; ++i) {
    Rng draw = root.stream(static_cast<std::uint64_t>(i));
    bool done = false;
    for (int attempt = 0; attempt < 2 && !done; ++attempt) {
      design.rightCols(cfg.m2) = draw.normal_matrix(t_len, cfg.m2);
      try {
        const QuantileFit fit = fit_quantile(design, y, tau);
        sum_sq += fit.coefficients.tail(cfg.m2).squaredNorm();
        done = true;
      } catch (const ConvergenceError&) {
        // one retry with a fresh draw; the second failure propagates
        if (attempt == 1) throw Error("estimate_density_at_zero: replication " +
                                      std::to_string(i) + " failed to converge twice");
        draw = root.stream(static_cast<std::uint64_t>(cfg.m1 + i));
      }
    }
  }

  const double m_total = static_cast<double>(cfg.m1) * static_cast<double>(cfg.m2);
  const double avar = static_cast<double>(t_len) * sum_sq / m_total;
  if (!(avar > 0.0))
    throw Error("estimate_density_at_zero: degenerate auxiliary coefficients");
  return std::sqrt(tau * (1.0 - tau) / avar);
}

}  // namespace qrivx
