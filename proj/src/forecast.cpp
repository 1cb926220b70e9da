#include "qrivx/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qrivx {

namespace {

Matrix design_for(const Matrix& x_lag, const std::vector<Index>& sel, Index rows) {
  Matrix d(rows, 1 + static_cast<Index>(sel.size()));
  d.col(0).setOnes();
  for (std::size_t j = 0; j < sel.size(); ++j)
    d.col(1 + j) = x_lag.col(sel[j]).head(rows);
  return d;
}

}  // namespace

QuantileGrid::QuantileGrid(std::vector<double> levels) : taus(std::move(levels)) {
  if (taus.empty()) throw ParameterError("QuantileGrid: empty grid");
  double prev = 0.0;
  for (double tau : taus) {
    if (!(tau > 0.0 && tau < 1.0)) throw ParameterError("QuantileGrid: level outside (0,1)");
    if (!(tau > prev)) throw ParameterError("QuantileGrid: levels must be strictly increasing");
    prev = tau;
  }
}

QuantileGrid QuantileGrid::percent() {
  std::vector<double> taus(99);
  for (int j = 1; j <= 99; ++j) taus[j - 1] = j / 100.0;
  return QuantileGrid(std::move(taus));
}

QuantileGrid QuantileGrid::from_unsorted(std::vector<double> levels,
                                         std::vector<Index>* permutation) {
  std::vector<Index> order(levels.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(),
            [&](Index a, Index b) { return levels[a] < levels[b]; });
  std::vector<double> sorted(levels.size());
  for (std::size_t i = 0; i < order.size(); ++i) sorted[i] = levels[order[i]];
  if (permutation) *permutation = order;
  return QuantileGrid(std::move(sorted));
}

Index SelectionMap::max_selected() const {
  Index m = 0;
  for (const auto& s : selected) m = std::max(m, static_cast<Index>(s.size()));
  return m;
}

SelectionMap select_predictors(const std::vector<std::vector<double>>& p_values,
                               double threshold) {
  if (p_values.empty()) throw ContractError("select_predictors: no grid cells");
  const std::size_t k = p_values.front().size();
  SelectionMap map;
  map.selected.resize(p_values.size());
  for (std::size_t j = 0; j < p_values.size(); ++j) {
    if (p_values[j].size() != k)
      throw ContractError("select_predictors: ragged p-value grid");
    for (std::size_t i = 0; i < k; ++i) {
      const double p = p_values[j][i];
      if (!(p >= 0.0 && p <= 1.0))
        throw ContractError("select_predictors: p-value outside [0,1]");
      if (p < threshold) map.selected[j].push_back(static_cast<Index>(i));
    }
  }
  return map;
}

Vector WeightScheme::values(const QuantileGrid& grid) const {
  Vector w(grid.size());
  for (Index j = 0; j < grid.size(); ++j) {
    const double tau = grid.taus[j];
    switch (kind) {
      case Kind::Center: w[j] = tau * (1.0 - tau); break;
      case Kind::LeftTail: w[j] = (1.0 - tau) * (1.0 - tau); break;
      case Kind::RightTail: w[j] = tau * tau; break;
      case Kind::BothTails: w[j] = (2.0 * tau - 1.0) * (2.0 * tau - 1.0); break;
      case Kind::NormalizedRight: w[j] = tau * tau; break;
      case Kind::NormalizedLeft: w[j] = -(1.0 - tau) * (1.0 - tau); break;
    }
  }
  if (kind == Kind::NormalizedRight) w /= w.sum();
  if (kind == Kind::NormalizedLeft) w /= -w.sum();
  return w;
}

std::string WeightScheme::name() const {
  switch (kind) {
    case Kind::Center: return "center";
    case Kind::LeftTail: return "left_tail";
    case Kind::RightTail: return "right_tail";
    case Kind::BothTails: return "both_tails";
    case Kind::NormalizedRight: return "normalized_right";
    case Kind::NormalizedLeft: return "normalized_left";
  }
  return "?";
}

InsampleFit fit_insample(const Vector& y, const Matrix& x_lag, const SelectionMap& sel,
                         const QuantileGrid& grid) {
  if (static_cast<Index>(sel.selected.size()) != grid.size())
    throw ContractError("fit_insample: selection and grid sizes differ");
  const Index t_len = y.size();
  InsampleFit out;
  out.fits.reserve(grid.size());
  out.predictions.resize(t_len, grid.size());
  out.errors.resize(t_len, grid.size());
  for (Index j = 0; j < grid.size(); ++j) {
    const Matrix design = design_for(x_lag, sel.selected[j], t_len);
    QuantileFit fit = fit_quantile(design, y, grid.taus[j]);
    out.predictions.col(j) = design * fit.coefficients;
    out.errors.col(j) = y - out.predictions.col(j);
    out.fits.push_back(std::move(fit));
  }
  return out;
}

OosForecast predict_oos(const Vector& y, const Matrix& x_lag, const SelectionMap& sel,
                        const QuantileGrid& grid, Index t_m, const Reselector& reselect) {
  if (static_cast<Index>(sel.selected.size()) != grid.size())
    throw ContractError("predict_oos: selection and grid sizes differ");
  const Index t_len = y.size();
  if (t_m >= t_len) throw ContractError("predict_oos: forecast start beyond sample");
  const Index min_window = 10 * (sel.max_selected() + 1);
  if (t_m < min_window)
    throw ContractError("predict_oos: expanding window too short (need " +
                        std::to_string(min_window) + " training rows)");

  OosForecast out;
  out.t_m = t_m;
  const Index horizon = t_len - t_m;
  out.predictions.resize(horizon, grid.size());
  out.errors.resize(horizon, grid.size());

  for (Index t = t_m; t < t_len; ++t) {
    const Index train = t;  // rows [0, t)
    SelectionMap window_sel;
    const SelectionMap* use = &sel;
    if (reselect) {
      window_sel = reselect(train);
      if (static_cast<Index>(window_sel.selected.size()) != grid.size())
        throw ContractError("predict_oos: reselection returned wrong grid size");
      use = &window_sel;
    }
    for (Index j = 0; j < grid.size(); ++j) {
      const auto& cols = use->selected[j];
      const Matrix design = design_for(x_lag, cols, train);
      const QuantileFit fit = fit_quantile(design, y.head(train), grid.taus[j]);
      double pred = fit.coefficients[0];
      for (std::size_t c = 0; c < cols.size(); ++c)
        pred += fit.coefficients[1 + c] * x_lag(t, cols[c]);
      out.predictions(t - t_m, j) = pred;
      out.errors(t - t_m, j) = y[t] - pred;
    }
    for (Index j = 1; j < grid.size(); ++j) {
      if (out.predictions(t - t_m, j) < out.predictions(t - t_m, j - 1)) {
        ++out.crossing_count;
        break;
      }
    }
  }
  return out;
}

ForecastEvaluation qw_crps(const Matrix& errors, const WeightScheme& scheme,
                           const QuantileGrid& grid) {
  const Index j_count = grid.size();
  if (errors.cols() != j_count) throw ContractError("qw_crps: errors/grid shape mismatch");
  if (j_count < 2) throw ContractError("qw_crps: need at least two grid levels");
  const Vector w = scheme.values(grid);

  ForecastEvaluation eval;
  eval.scheme = scheme.name();
  eval.per_period.resize(errors.rows());
  const double scale = 2.0 / static_cast<double>(j_count - 1);
  for (Index t = 0; t < errors.rows(); ++t) {
    double s = 0.0;
    for (Index j = 0; j + 1 < j_count; ++j)
      s += w[j] * check_loss(errors(t, j), grid.taus[j]);
    eval.per_period[t] = scale * s;
  }
  eval.qw_c = errors.rows() > 0 ? eval.per_period.mean() : 0.0;
  return eval;
}

Vector tail_indicator(const Matrix& predictions, TailSide side, const QuantileGrid& grid) {
  if (predictions.cols() != grid.size())
    throw ContractError("tail_indicator: predictions/grid shape mismatch");
  const WeightScheme scheme = side == TailSide::Right ? WeightScheme::normalized_right()
                                                      : WeightScheme::normalized_left();
  return predictions * scheme.values(grid);
}

}  // namespace qrivx
