#include "qrivx/dataset.hpp"

#include <cctype>

#include "qrivx/predictors.hpp"

namespace qrivx {

namespace {

bool parse_year_month(const std::string& s, int& year, int& month) {
  if (s.size() != 7 || s[4] != '-') return false;
  for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u})
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  year = std::stoi(s.substr(0, 4));
  month = std::stoi(s.substr(5, 2));
  return month >= 1 && month <= 12;
}

}  // namespace

DataFile load_data_file(const std::string& path, const std::string& date_column) {
  DataFile file;
  file.table = read_csv(path);
  file.dates = file.table.column_text(date_column);

  int prev_year = 0, prev_month = 0;
  for (std::size_t i = 0; i < file.dates.size(); ++i) {
    int year = 0, month = 0;
    if (!parse_year_month(file.dates[i], year, month))
      throw DataError("date '" + file.dates[i] + "' at data row " + std::to_string(i + 1) +
                      " is not ISO yyyy-mm");
    if (i > 0) {
      const bool consecutive = (year == prev_year && month == prev_month + 1) ||
                               (year == prev_year + 1 && month == 1 && prev_month == 12);
      if (!consecutive)
        throw DataError("dates must advance by one month; got '" + file.dates[i - 1] +
                        "' then '" + file.dates[i] + "'");
    }
    prev_year = year;
    prev_month = month;
  }
  return file;
}

BuiltPanel build_panel(const DataFile& file, const PanelSpec& spec) {
  const Index n = file.rows();
  if (n < 3) throw DataError("build_panel: too few rows");
  const Vector response = file.table.column_numeric(spec.response);
  if (spec.predictors.empty()) throw DataError("build_panel: no predictors configured");

  BuiltPanel panel;
  panel.y = response.tail(n - 1);
  panel.periods.assign(file.dates.begin() + 1, file.dates.end());
  panel.x_lag.resize(n - 1, static_cast<Index>(spec.predictors.size()));

  for (std::size_t j = 0; j < spec.predictors.size(); ++j) {
    const PredictorSpec& p = spec.predictors[j];
    panel.predictor_names.push_back(p.name);
    switch (p.kind) {
      case PredictorSpec::Kind::RawLagged: {
        const Vector raw = file.table.column_numeric(p.source.empty() ? p.name : p.source);
        panel.x_lag.col(j) = raw.head(n - 1);
        break;
      }
      case PredictorSpec::Kind::Trend: {
        if (p.source.empty())
          throw DataError("predictor '" + p.name + "': trend needs a source column");
        const Vector increments = file.table.column_numeric(p.source);
        // trend value at period t uses increments through t-1, so entry t is
        // already the lagged regressor for response row t
        const Vector trend = construct_trend(increments, p.w);
        panel.x_lag.col(j) = trend.tail(n - 1);
        break;
      }
      case PredictorSpec::Kind::CpFactor: {
        if (p.forwards.empty())
          throw DataError("predictor '" + p.name + "': CP factor needs forward-rate columns");
        if (spec.avg_rx_columns.empty())
          throw DataError("predictor '" + p.name + "': CP factor needs avg_rx_columns");
        Vector avg_rx = Vector::Zero(n);
        for (const auto& col : spec.avg_rx_columns)
          avg_rx += file.table.column_numeric(col);
        avg_rx /= static_cast<double>(spec.avg_rx_columns.size());
        Matrix forwards(n - 1, static_cast<Index>(p.forwards.size()));
        for (std::size_t f = 0; f < p.forwards.size(); ++f)
          forwards.col(f) = file.table.column_numeric(p.forwards[f]).head(n - 1);
        // regression of avg_rx_t on lagged forwards, full sample; fitted
        // values are the factor, one per response row
        panel.x_lag.col(j) = construct_cp(forwards, avg_rx.tail(n - 1));
        break;
      }
    }
  }
  if (!panel.x_lag.allFinite()) throw DataError("build_panel: non-finite regressor values");
  return panel;
}

}  // namespace qrivx
