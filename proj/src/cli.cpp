#include "qrivx/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "parallel.hpp"
#include "qrivx/csv.hpp"
#include "qrivx/dataset.hpp"
#include "qrivx/montecarlo.hpp"
#include "qrivx/predictors.hpp"

namespace qrivx {

namespace {

using nlohmann::json;

std::string fmt(double v, const char* spec = "%.10g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError("config '" + path + "': " + e.what());
  }
}

std::vector<double> parse_tau_grid(const std::string& spec) {
  if (spec == "percent") return QuantileGrid::percent().taus;
  std::vector<double> taus;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      taus.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw DataError("bad --tau-grid entry '" + item + "'");
    }
  }
  if (taus.empty()) throw DataError("empty --tau-grid");
  return taus;
}

PanelSpec panel_spec_from(const json& data_cfg) {
  PanelSpec spec;
  if (!data_cfg.contains("response")) throw DataError("config: data.response is required");
  spec.response = data_cfg.at("response").get<std::string>();
  if (data_cfg.contains("avg_rx_columns"))
    spec.avg_rx_columns = data_cfg.at("avg_rx_columns").get<std::vector<std::string>>();
  if (!data_cfg.contains("predictors")) throw DataError("config: data.predictors is required");
  for (const auto& p : data_cfg.at("predictors")) {
    PredictorSpec ps;
    ps.name = p.at("name").get<std::string>();
    const std::string kind = p.value("kind", std::string("raw"));
    if (kind == "raw") {
      ps.kind = PredictorSpec::Kind::RawLagged;
      ps.source = p.value("source", ps.name);
    } else if (kind == "trend") {
      ps.kind = PredictorSpec::Kind::Trend;
      ps.source = p.value("source", std::string());
      ps.w = p.value("w", 0.9);
    } else if (kind == "cp") {
      ps.kind = PredictorSpec::Kind::CpFactor;
      ps.forwards = p.at("forwards").get<std::vector<std::string>>();
    } else {
      throw DataError("config: unknown predictor kind '" + kind + "'");
    }
    spec.predictors.push_back(std::move(ps));
  }
  return spec;
}

GridTestConfig grid_config_from(const json& cfg, Index k) {
  GridTestConfig g(k);
  if (cfg.contains("inference")) {
    const json& inf = cfg.at("inference");
    if (inf.contains("tau_grid")) {
      if (inf.at("tau_grid").is_string())
        g.taus = parse_tau_grid(inf.at("tau_grid").get<std::string>());
      else
        g.taus = inf.at("tau_grid").get<std::vector<double>>();
    }
    if (inf.contains("c_z") && !inf.at("c_z").is_null())
      g.instrument.c_z = inf.at("c_z").get<double>();
    g.instrument.delta = inf.value("delta", g.instrument.delta);
    g.instrument.lambda = inf.value("lambda", g.instrument.lambda);
    g.density_m1 = inf.value("m1", g.density_m1);
    g.density_m2 = inf.value("m2", g.density_m2);
    g.threshold = inf.value("threshold", g.threshold);
    g.seed = inf.value("seed", g.seed);
    g.threads = inf.value("threads", g.threads);
  }
  if (g.taus.empty()) g.taus = QuantileGrid::percent().taus;
  return g;
}

PersistenceSpec persistence_from(const json& p, Index k) {
  const std::string kind = p.at("kind").get<std::string>();
  PersistenceSpec spec;
  if (kind == "SD" || kind == "sd") {
    if (p.at("c").is_array()) {
      spec = PersistenceSpec::sd(0.0, k);
      const auto c = p.at("c").get<std::vector<double>>();
      spec.c = Eigen::Map<const Vector>(c.data(), static_cast<Index>(c.size()));
    } else {
      spec = PersistenceSpec::sd(p.at("c").get<double>(), k);
    }
  } else if (kind == "WD" || kind == "wd") {
    if (p.at("c").is_array()) {
      spec = PersistenceSpec::wd(0.0, k);
      const auto c = p.at("c").get<std::vector<double>>();
      spec.c = Eigen::Map<const Vector>(c.data(), static_cast<Index>(c.size()));
    } else {
      spec = PersistenceSpec::wd(p.at("c").get<double>(), k);
    }
  } else if (kind == "direct") {
    const auto rho = p.at("rho").get<std::vector<double>>();
    spec = PersistenceSpec::direct(
        Eigen::Map<const Vector>(rho.data(), static_cast<Index>(rho.size())));
  } else {
    throw DataError("config: unknown persistence kind '" + kind + "'");
  }
  if (p.contains("label")) spec.label = p.at("label").get<std::string>();
  if (spec.c.size() != k) throw DataError("config: persistence dimension != K");
  return spec;
}

Side side_from(const std::string& s) {
  if (s == "two" || s == "two_sided") return Side::TwoSided;
  if (s == "right") return Side::Right;
  if (s == "left") return Side::Left;
  throw DataError("config: unknown side '" + s + "'");
}

McConfig mc_config_from(const json& sim) {
  McConfig cfg;
  cfg.t_len = sim.value("T", 750);
  cfg.reps = sim.value("reps", 1000);
  if (sim.contains("taus")) cfg.taus = sim.at("taus").get<std::vector<double>>();
  cfg.k = sim.value("K", 1);
  if (!sim.contains("gamma")) throw DataError("config: simulate.gamma is required");
  const auto gamma = sim.at("gamma").get<std::vector<double>>();
  if (static_cast<Index>(gamma.size()) != cfg.k)
    throw DataError("config: simulate.gamma length != K");
  cfg.gamma = Eigen::Map<const Vector>(gamma.data(), static_cast<Index>(gamma.size()));
  if (sim.contains("beta_grid")) cfg.beta_grid = sim.at("beta_grid").get<std::vector<double>>();
  if (!sim.contains("persistence")) throw DataError("config: simulate.persistence is required");
  for (const auto& p : sim.at("persistence"))
    cfg.persistence.push_back(persistence_from(p, cfg.k));
  if (sim.contains("error")) {
    const json& e = sim.at("error");
    const std::string kind = e.value("kind", std::string("IID"));
    if (kind == "GARCH" || kind == "garch") {
      cfg.error.kind = ErrorSpec::Kind::GARCH;
      cfg.error.mu_sigma = e.value("mu_sigma", 1.0);
      cfg.error.arch_coeffs = e.value("a", std::vector<double>{});
      cfg.error.garch_coeffs = e.value("b", std::vector<double>{});
    } else if (kind != "IID" && kind != "iid") {
      throw DataError("config: unknown error kind '" + kind + "'");
    }
  }
  cfg.mu_tau = sim.value("mu_tau", 1.0);
  cfg.nominal_size = sim.value("nominal_size", 0.05);
  cfg.seed = sim.value("seed", cfg.seed);
  if (sim.contains("c_z") && !sim.at("c_z").is_null()) cfg.c_z = sim.at("c_z").get<double>();
  cfg.delta = sim.value("delta", cfg.delta);
  cfg.lambda = sim.value("lambda", cfg.lambda);
  cfg.density_m1 = sim.value("m1", cfg.density_m1);
  cfg.density_m2 = sim.value("m2", cfg.density_m2);
  cfg.with_ivx = sim.value("with_ivx", false);
  cfg.threads = sim.value("threads", 0);
  if (sim.contains("hypotheses") && sim.at("hypotheses").is_array()) {
    for (const auto& h : sim.at("hypotheses")) {
      const std::string type = h.at("type").get<std::string>();
      const Side side = side_from(h.value("side", std::string("two")));
      if (type == "joint") {
        cfg.hypotheses.push_back({"joint", Hypothesis::joint(cfg.k)});
      } else if (type == "marginal") {
        const Index i = h.at("index").get<Index>() - 1;  // 1-based in config
        if (i < 0 || i >= cfg.k) throw DataError("config: marginal index out of range");
        std::string name = "x" + std::to_string(i + 1);
        if (side == Side::Right) name += "_right";
        if (side == Side::Left) name += "_left";
        cfg.hypotheses.push_back({name, Hypothesis::marginal(i, cfg.k, side)});
      } else {
        throw DataError("config: unknown hypothesis type '" + type + "'");
      }
    }
  }
  return cfg;
}

std::filesystem::path prepare_out_dir(const std::string& out) {
  std::filesystem::path dir(out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory '" + out + "'");
  return dir;
}

// ---- subcommand bodies -----------------------------------------------------

struct CommonArgs {
  std::string config_path;
  std::string data_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> tau_grid;
  std::optional<double> threshold;
  int threads = 0;
};

struct LoadedPanel {
  BuiltPanel panel;
  GridTestConfig grid_cfg;
  json cfg;
};

LoadedPanel load_panel_and_config(const CommonArgs& args) {
  if (args.config_path.empty()) throw DataError("--config is required");
  if (args.data_path.empty()) throw DataError("--data is required");
  json cfg = load_config(args.config_path);
  if (!cfg.contains("data")) throw DataError("config: missing 'data' section");
  const std::string date_col = cfg.at("data").value("date_column", std::string("date"));
  const DataFile file = load_data_file(args.data_path, date_col);
  BuiltPanel panel = build_panel(file, panel_spec_from(cfg.at("data")));

  GridTestConfig grid_cfg = grid_config_from(cfg, panel.x_lag.cols());
  if (args.seed) grid_cfg.seed = *args.seed;
  if (args.tau_grid) grid_cfg.taus = parse_tau_grid(*args.tau_grid);
  if (args.threshold) grid_cfg.threshold = *args.threshold;
  if (args.threads > 0) grid_cfg.threads = args.threads;
  return {std::move(panel), std::move(grid_cfg), std::move(cfg)};
}

std::string test_rows_csv(const std::vector<GridTestRow>& rows) {
  std::ostringstream out;
  out << "tau,hypothesis,statistic,df,p_value,log_p_clipped\n";
  for (const auto& r : rows) {
    const double logp = std::log(std::max(0.001, r.result.p_value));
    out << fmt(r.tau) << ',' << r.hypothesis << ',' << fmt(r.result.statistic) << ','
        << r.result.df << ',' << fmt(r.result.p_value) << ',' << fmt(logp) << '\n';
  }
  return out.str();
}

int cmd_simulate(const CommonArgs& args) {
  if (args.config_path.empty()) throw DataError("--config is required");
  const json cfg = load_config(args.config_path);
  if (!cfg.contains("simulate")) throw DataError("config: missing 'simulate' section");
  McConfig mc = mc_config_from(cfg.at("simulate"));
  if (args.seed) mc.seed = *args.seed;
  if (args.threads > 0) mc.threads = args.threads;

  const McReport report = run_experiment(mc);
  const auto dir = prepare_out_dir(args.out_dir);
  write_text_file((dir / "mc_rejections.csv").string(), to_csv(report));
  write_text_file((dir / "mc_tables.txt").string(), to_text(report));
  std::cout << "simulate: " << report.cells.size() << " cells, " << report.failures
            << " failed replications, " << fmt(report.wall_seconds, "%.1f")
            << "s\n";
  return 0;
}

int cmd_test(const CommonArgs& args) {
  LoadedPanel loaded = load_panel_and_config(args);
  const auto rows = run_test_grid(loaded.panel.y, loaded.panel.x_lag,
                                  loaded.panel.predictor_names, loaded.grid_cfg);
  const auto dir = prepare_out_dir(args.out_dir);
  write_text_file((dir / "test_pvalues.csv").string(), test_rows_csv(rows));
  std::cout << "test: " << rows.size() << " rows over " << loaded.grid_cfg.taus.size()
            << " quantile levels\n";
  return 0;
}

struct ForecastArtifacts {
  QuantileGrid grid;
  SelectionMap selection;
  InsampleFit insample;
  OosForecast oos;
  std::vector<GridTestRow> test_rows;
};

Index resolve_t_m(const json& cfg, const BuiltPanel& panel) {
  if (!cfg.contains("forecast") || !cfg.at("forecast").contains("t_m"))
    throw DataError("config: forecast.t_m is required");
  const json& tm = cfg.at("forecast").at("t_m");
  if (tm.is_number_integer()) {
    const Index idx = tm.get<Index>();
    if (idx < 1 || idx >= static_cast<Index>(panel.periods.size()))
      throw DataError("config: forecast.t_m out of range");
    return idx;
  }
  const std::string date = tm.get<std::string>();
  for (std::size_t i = 0; i < panel.periods.size(); ++i)
    if (panel.periods[i] == date) return static_cast<Index>(i);
  throw DataError("config: forecast.t_m date '" + date + "' not in sample");
}

ForecastArtifacts run_forecast_pipeline(const LoadedPanel& loaded) {
  const BuiltPanel& panel = loaded.panel;
  const Index k = panel.x_lag.cols();
  QuantileGrid grid(loaded.grid_cfg.taus);

  ForecastArtifacts art{grid, {}, {}, {}, {}};
  art.test_rows =
      run_test_grid(panel.y, panel.x_lag, panel.predictor_names, loaded.grid_cfg);
  const auto pvals = marginal_p_values(art.test_rows, grid.size(), k);
  art.selection = select_predictors(pvals, loaded.grid_cfg.threshold);
  art.insample = fit_insample(panel.y, panel.x_lag, art.selection, grid);

  const Index t_m = resolve_t_m(loaded.cfg, panel);
  const bool reselect = loaded.cfg.contains("forecast") &&
                        loaded.cfg.at("forecast").value("reselect", false);
  Reselector reselector;
  if (reselect) {
    const GridTestConfig grid_cfg = loaded.grid_cfg;
    const Vector y = panel.y;
    const Matrix x_lag = panel.x_lag;
    const auto names = panel.predictor_names;
    const Index grid_size = grid.size();
    reselector = [=](Index train_len) {
      const auto rows =
          run_test_grid(y.head(train_len), x_lag.topRows(train_len), names, grid_cfg);
      return select_predictors(marginal_p_values(rows, grid_size, k), grid_cfg.threshold);
    };
  }
  art.oos = predict_oos(panel.y, panel.x_lag, art.selection, grid, t_m, reselector);
  return art;
}

std::string predictions_csv(const Matrix& predictions, const Matrix& errors,
                            const std::vector<std::string>& periods, Index first_row,
                            const QuantileGrid& grid) {
  std::ostringstream out;
  out << "period,tau,prediction,error\n";
  for (Index t = 0; t < predictions.rows(); ++t)
    for (Index j = 0; j < grid.size(); ++j)
      out << periods[first_row + t] << ',' << fmt(grid.taus[j]) << ','
          << fmt(predictions(t, j)) << ',' << fmt(errors(t, j)) << '\n';
  return out.str();
}

int cmd_forecast(const CommonArgs& args) {
  LoadedPanel loaded = load_panel_and_config(args);
  const ForecastArtifacts art = run_forecast_pipeline(loaded);
  const auto dir = prepare_out_dir(args.out_dir);

  write_text_file((dir / "test_pvalues.csv").string(), test_rows_csv(art.test_rows));

  std::ostringstream sel;
  sel << "tau,selected\n";
  for (Index j = 0; j < art.grid.size(); ++j) {
    sel << fmt(art.grid.taus[j]) << ',';
    const auto& s = art.selection.selected[j];
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (i) sel << ';';
      sel << loaded.panel.predictor_names[s[i]];
    }
    sel << '\n';
  }
  write_text_file((dir / "selection.csv").string(), sel.str());

  write_text_file((dir / "insample_predictions.csv").string(),
                  predictions_csv(art.insample.predictions, art.insample.errors,
                                  loaded.panel.periods, 0, art.grid));
  write_text_file((dir / "oos_predictions.csv").string(),
                  predictions_csv(art.oos.predictions, art.oos.errors,
                                  loaded.panel.periods, art.oos.t_m, art.grid));

  std::ostringstream eval;
  eval << "scheme,qw_c_insample,qw_c_oos\n";
  for (const WeightScheme& scheme :
       {WeightScheme::center(), WeightScheme::left_tail(), WeightScheme::right_tail(),
        WeightScheme::both_tails()}) {
    const auto ins = qw_crps(art.insample.errors, scheme, art.grid);
    const auto oos = qw_crps(art.oos.errors, scheme, art.grid);
    eval << scheme.name() << ',' << fmt(ins.qw_c) << ',' << fmt(oos.qw_c) << '\n';
  }
  write_text_file((dir / "evaluation.csv").string(), eval.str());

  std::cout << "forecast: " << art.oos.predictions.rows() << " out-of-sample periods, "
            << art.oos.crossing_count << " with crossing quantile predictions\n";
  return 0;
}

int cmd_indicator(const CommonArgs& args) {
  LoadedPanel loaded = load_panel_and_config(args);
  const ForecastArtifacts art = run_forecast_pipeline(loaded);
  const auto dir = prepare_out_dir(args.out_dir);

  const Vector left = tail_indicator(art.oos.predictions, TailSide::Left, art.grid);
  const Vector right = tail_indicator(art.oos.predictions, TailSide::Right, art.grid);
  std::ostringstream out;
  out << "period,indicator_left,indicator_right\n";
  for (Index t = 0; t < left.size(); ++t)
    out << loaded.panel.periods[art.oos.t_m + t] << ',' << fmt(left[t]) << ','
        << fmt(right[t]) << '\n';
  write_text_file((dir / "indicators.csv").string(), out.str());
  write_text_file((dir / "oos_predictions.csv").string(),
                  predictions_csv(art.oos.predictions, art.oos.errors,
                                  loaded.panel.periods, art.oos.t_m, art.grid));
  std::cout << "indicator: " << left.size() << " periods\n";
  return 0;
}

int cmd_ar1(const CommonArgs& args) {
  if (args.data_path.empty()) throw DataError("--data is required");
  std::ostringstream out;
  out << "predictor,ar1\n";
  if (!args.config_path.empty()) {
    const json cfg = load_config(args.config_path);
    if (!cfg.contains("data")) throw DataError("config: missing 'data' section");
    const std::string date_col = cfg.at("data").value("date_column", std::string("date"));
    const DataFile file = load_data_file(args.data_path, date_col);
    const BuiltPanel panel = build_panel(file, panel_spec_from(cfg.at("data")));
    const Vector coeffs = ar1_coefficients(panel.x_lag);
    for (Index j = 0; j < coeffs.size(); ++j)
      out << panel.predictor_names[j] << ',' << fmt(coeffs[j], "%.3f") << '\n';
  } else {
    const DataFile file = load_data_file(args.data_path, "date");
    std::vector<std::string> cols;
    for (const auto& name : file.table.header)
      if (name != "date") cols.push_back(name);
    Matrix series(file.rows(), static_cast<Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j)
      series.col(static_cast<Index>(j)) = file.table.column_numeric(cols[j]);
    const Vector coeffs = ar1_coefficients(series);
    for (std::size_t j = 0; j < cols.size(); ++j)
      out << cols[j] << ',' << fmt(coeffs[static_cast<Index>(j)], "%.3f") << '\n';
  }
  const auto dir = prepare_out_dir(args.out_dir);
  write_text_file((dir / "ar1.csv").string(), out.str());
  std::cout << out.str();
  return 0;
}

}  // namespace

std::vector<GridTestRow> run_test_grid(const Vector& y, const Matrix& x_lag,
                                       const std::vector<std::string>& predictor_names,
                                       const GridTestConfig& cfg) {
  const Index k = x_lag.cols();
  if (static_cast<Index>(predictor_names.size()) != k)
    throw ContractError("run_test_grid: predictor name count != K");
  const QuantileGrid grid(cfg.taus);
  const InstrumentSet iv = make_instruments(x_lag, cfg.instrument);

  const Hypothesis joint = Hypothesis::joint(k);
  std::vector<Hypothesis> marginals;
  for (Index i = 0; i < k; ++i) marginals.push_back(Hypothesis::marginal(i, k));

  std::vector<std::vector<GridTestRow>> per_tau(grid.size());
  detail::parallel_for(static_cast<std::size_t>(grid.size()), cfg.threads, [&](std::size_t j) {
    const double tau = grid.taus[j];
    DensityConfig dens;
    dens.m1 = cfg.density_m1;
    dens.m2 = cfg.density_m2;
    dens.seed = Rng(cfg.seed).stream(j).seed();
    const TauContext ctx =
        analyze_tau(y, x_lag, iv, tau, dens, cfg.instrument.delta);
    auto& rows = per_tau[j];
    rows.push_back({tau, "joint", q_m(ctx, joint)});
    for (Index i = 0; i < k; ++i)
      rows.push_back({tau, predictor_names[i], q_m(ctx, marginals[i])});
  });

  std::vector<GridTestRow> rows;
  rows.reserve(grid.size() * (k + 1));
  for (auto& block : per_tau)
    for (auto& r : block) rows.push_back(std::move(r));
  return rows;
}

std::pair<std::string, std::string> run_simulation_config(const std::string& json_text) {
  json cfg;
  try {
    cfg = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("simulate config: ") + e.what());
  }
  const McConfig mc = mc_config_from(cfg.contains("simulate") ? cfg.at("simulate") : cfg);
  const McReport report = run_experiment(mc);
  return {to_csv(report), to_text(report)};
}

std::vector<std::vector<double>> marginal_p_values(const std::vector<GridTestRow>& rows,
                                                   Index grid_size, Index k) {
  std::vector<std::vector<double>> out(grid_size, std::vector<double>(k, 1.0));
  Index row = 0;
  for (Index j = 0; j < grid_size; ++j) {
    if (row >= static_cast<Index>(rows.size()) || rows[row].hypothesis != "joint")
      throw ContractError("marginal_p_values: unexpected row layout");
    ++row;  // skip joint
    for (Index i = 0; i < k; ++i, ++row) {
      if (row >= static_cast<Index>(rows.size()))
        throw ContractError("marginal_p_values: missing grid cells");
      out[j][i] = rows[row].result.p_value;
    }
  }
  return out;
}

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Robust predictive quantile regression inference"};
  app.require_subcommand(1);

  CommonArgs common;
  auto add_common = [&](CLI::App* sub, bool needs_data) {
    sub->add_option("--config", common.config_path, "JSON configuration file");
    if (needs_data) sub->add_option("--data", common.data_path, "input CSV data file");
    sub->add_option("--out", common.out_dir, "output directory");
    sub->add_option("--seed", common.seed, "seed override");
    sub->add_option("--tau-grid", common.tau_grid,
                    "'percent' or comma separated levels");
    sub->add_option("--threshold", common.threshold, "selection p-value threshold");
    sub->add_option("--threads", common.threads, "worker thread count");
  };

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo size/power tables");
  add_common(simulate, false);
  auto* test = app.add_subcommand("test", "joint and marginal predictability tests");
  add_common(test, true);
  auto* forecast = app.add_subcommand("forecast", "in/out-of-sample quantile forecasts");
  add_common(forecast, true);
  auto* indicator = app.add_subcommand("indicator", "tail risk indicator series");
  add_common(indicator, true);
  auto* ar1 = app.add_subcommand("ar1", "AR(1) coefficients of panel predictors");
  add_common(ar1, true);

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (simulate->parsed()) return cmd_simulate(common);
    if (test->parsed()) return cmd_test(common);
    if (forecast->parsed()) return cmd_forecast(common);
    if (indicator->parsed()) return cmd_indicator(common);
    if (ar1->parsed()) return cmd_ar1(common);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace qrivx
