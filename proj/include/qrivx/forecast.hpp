#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qrivx/qr_solver.hpp"
#include "qrivx/types.hpp"

namespace qrivx {

// Strictly increasing quantile levels in (0,1).
struct QuantileGrid {
  std::vector<double> taus;

  explicit QuantileGrid(std::vector<double> levels);
  Index size() const { return static_cast<Index>(taus.size()); }

  // default grid 0.01, 0.02, ..., 0.99
  static QuantileGrid percent();
  // sorts the levels and reports the applied permutation
  static QuantileGrid from_unsorted(std::vector<double> levels,
                                    std::vector<Index>* permutation);
};

// Index sets of predictors kept at each grid level (p-value below threshold).
struct SelectionMap {
  std::vector<std::vector<Index>> selected;  // one entry per grid level

  Index max_selected() const;
};

// p-values laid out as [grid level][predictor]
SelectionMap select_predictors(const std::vector<std::vector<double>>& p_values,
                               double threshold);

struct WeightScheme {
  enum class Kind { Center, LeftTail, RightTail, BothTails, NormalizedRight, NormalizedLeft };
  Kind kind = Kind::Center;

  // weight values along the grid; normalized kinds sum to +1 / -1
  Vector values(const QuantileGrid& grid) const;
  std::string name() const;

  static WeightScheme center() { return {Kind::Center}; }
  static WeightScheme left_tail() { return {Kind::LeftTail}; }
  static WeightScheme right_tail() { return {Kind::RightTail}; }
  static WeightScheme both_tails() { return {Kind::BothTails}; }
  static WeightScheme normalized_right() { return {Kind::NormalizedRight}; }
  static WeightScheme normalized_left() { return {Kind::NormalizedLeft}; }
};

struct InsampleFit {
  std::vector<QuantileFit> fits;  // one per grid level
  Matrix predictions;             // T x J
  Matrix errors;                  // T x J, y_t - prediction
};

// Quantile regressions of y on the selected predictors per grid level.
// Empty selections fall back to intercept-only fits.
InsampleFit fit_insample(const Vector& y, const Matrix& x_lag, const SelectionMap& sel,
                         const QuantileGrid& grid);

struct OosForecast {
  Index t_m = 0;              // first forecast period (0-based row of y)
  Matrix predictions;         // (T - t_m) x J
  Matrix errors;              // (T - t_m) x J
  int crossing_count = 0;     // periods where predictions decrease in tau
};

// Expanding-window forecasts: for each period from t_m on, refit on all
// earlier rows and predict from the current lagged regressors. The selection
// is fixed up front; pass reselect to redo it per window on the training rows.
using Reselector = std::function<SelectionMap(Index train_len)>;
OosForecast predict_oos(const Vector& y, const Matrix& x_lag, const SelectionMap& sel,
                        const QuantileGrid& grid, Index t_m,
                        const Reselector& reselect = nullptr);

struct ForecastEvaluation {
  Vector per_period;  // one qw-CRPS value per period
  double qw_c = 0.0;  // average
  std::string scheme;
};

// qw-CRPS_t = 2/(J-1) * sum_{j<J} W(tau_j) rho_{tau_j}(errors(t,j)); the last
// grid level is left out of the sum.
ForecastEvaluation qw_crps(const Matrix& errors, const WeightScheme& scheme,
                           const QuantileGrid& grid);

// Tail-risk indicator: weighted sum of the per-period quantile predictions
// with normalized right (sums to +1) or left (sums to -1) tail weights.
enum class TailSide { Left, Right };
Vector tail_indicator(const Matrix& predictions, TailSide side, const QuantileGrid& grid);

}  // namespace qrivx
