#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qrivx/density.hpp"
#include "qrivx/forecast.hpp"
#include "qrivx/ivx.hpp"
#include "qrivx/stats.hpp"

namespace qrivx {

// Shared by the test/forecast/indicator subcommands and callers that want
// the p-value grid without going through files.
struct GridTestConfig {
  std::vector<double> taus;  // validated through QuantileGrid
  InstrumentConfig instrument;
  int density_m1 = 100;
  int density_m2 = 50;
  double threshold = 0.01;
  std::uint64_t seed = 20240701;
  int threads = 0;

  explicit GridTestConfig(Index k) : instrument(k) {}
};

struct GridTestRow {
  double tau = 0.0;
  std::string hypothesis;  // "joint" or a predictor name
  TestResult result;       // Qm for joint/marginal two-sided tests
};

// Joint and per-predictor two-sided tests at every grid level. Rows are
// ordered (tau, joint, predictors...) and count exactly |grid| * (K + 1).
std::vector<GridTestRow> run_test_grid(const Vector& y, const Matrix& x_lag,
                                       const std::vector<std::string>& predictor_names,
                                       const GridTestConfig& cfg);

// p-values of the marginal rows arranged [grid level][predictor], ready for
// select_predictors
std::vector<std::vector<double>> marginal_p_values(const std::vector<GridTestRow>& rows,
                                                   Index grid_size, Index k);

// Runs a Monte Carlo experiment described by the same JSON text the CLI
// accepts under "simulate"; returns the rejection CSV and the text tables.
std::pair<std::string, std::string> run_simulation_config(const std::string& json_text);

int run_cli(const std::vector<std::string>& args);

}  // namespace qrivx
