#pragma once

#include <cstdint>

#include "qrivx/types.hpp"

namespace qrivx {

struct DensityConfig {
  int m1 = 100;  // replications
  int m2 = 50;   // auxiliary regressors per replication
  std::uint64_t seed = 0;

  void validate() const;
};

// Simulation-based estimate of the density of the quantile error at zero.
// For each of M1 replications, T x M2 fresh standard normal regressors are
// appended to (1, x) and the quantile regression is refit; the average of
// T * lhat^2 over all M1*M2 auxiliary coefficients identifies
// tau(1-tau) / f(0)^2. x may have zero columns (intercept-only model).
double estimate_density_at_zero(const Vector& y, const Matrix& x_lag, double tau,
                                const DensityConfig& cfg);

}  // namespace qrivx
