#pragma once

#include <string>
#include <vector>

#include "qrivx/csv.hpp"
#include "qrivx/types.hpp"

namespace qrivx {

// Monthly data file: ISO yyyy-mm dates, strictly consecutive, all used
// columns numeric and complete.
struct DataFile {
  std::vector<std::string> dates;
  CsvTable table;

  Index rows() const { return static_cast<Index>(dates.size()); }
};

DataFile load_data_file(const std::string& path, const std::string& date_column = "date");

// How one regressor column of the panel is produced from the raw file.
struct PredictorSpec {
  enum class Kind { RawLagged, Trend, CpFactor };
  std::string name;
  Kind kind = Kind::RawLagged;
  std::string source;                 // raw column (RawLagged) or increment column (Trend)
  double w = 0.9;                     // Trend smoothing
  std::vector<std::string> forwards;  // CpFactor forward-rate columns
};

struct PanelSpec {
  std::string response;                    // response column, e.g. rx2
  std::vector<std::string> avg_rx_columns; // responses averaged for the CP regression
  std::vector<PredictorSpec> predictors;
};

// Lag-aligned estimation panel: y_t paired with regressors known at t-1.
// The first file row is consumed by the lag, so y covers rows 2..n.
struct BuiltPanel {
  Vector y;
  Matrix x_lag;
  std::vector<std::string> predictor_names;
  std::vector<std::string> periods;  // dates aligned with y
};

BuiltPanel build_panel(const DataFile& file, const PanelSpec& spec);

}  // namespace qrivx
