#pragma once

#include "qrivx/types.hpp"

namespace qrivx {

// Exponentially weighted backward sum: entry t (0-based period t+1) equals
// (1-w) * sum_{i=1..t} w^i * series[t-i], computed by the O(T) recursion
// out[t] = w * (out[t-1] + (1-w) * series[t-1]). Entry 0 is zero (empty sum).
Vector construct_trend(const Vector& series, double w);

// Fitted values of regressing the average excess return on an intercept and
// the (already lag-aligned) forward rates; rows must correspond one-to-one.
Vector construct_cp(const Matrix& forward_rates, const Vector& avg_rx);

// OLS AR(1) slope of each column (x_t on intercept and x_{t-1})
Vector ar1_coefficients(const Matrix& series);

}  // namespace qrivx
