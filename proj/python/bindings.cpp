#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qrivx/cli.hpp"
#include "qrivx/dgp.hpp"
#include "qrivx/distributions.hpp"
#include "qrivx/forecast.hpp"
#include "qrivx/predictors.hpp"
#include "qrivx/stats.hpp"

namespace py = pybind11;
using namespace qrivx;

namespace {

InstrumentConfig make_iv_config(Index k, std::optional<double> c_z, double delta,
                                double lambda) {
  InstrumentConfig cfg(k);
  if (c_z) cfg.c_z = *c_z;
  cfg.delta = delta;
  cfg.lambda = lambda;
  return cfg;
}

WeightScheme scheme_by_name(const std::string& name) {
  for (const WeightScheme s :
       {WeightScheme::center(), WeightScheme::left_tail(), WeightScheme::right_tail(),
        WeightScheme::both_tails(), WeightScheme::normalized_right(),
        WeightScheme::normalized_left()}) {
    if (s.name() == name) return s;
  }
  throw ParameterError("unknown weight scheme '" + name + "'");
}

py::dict result_to_dict(const TestResult& r) {
  py::dict d;
  d["statistic"] = r.statistic;
  d["df"] = static_cast<long>(r.df);
  d["p_value"] = r.p_value;
  d["kind"] = to_string(r.kind);
  d["overflowed"] = r.overflowed;
  return d;
}

}  // namespace

PYBIND11_MODULE(_qrivx, m) {
  m.doc() = "Robust predictive quantile regression with IVX instruments";

  py::register_exception<Error>(m, "QrivxError");

  // distributions
  m.def("norm_cdf", &dist::norm_cdf, py::arg("x"));
  m.def("norm_quantile", &dist::norm_quantile, py::arg("p"));
  m.def("chi2_cdf", &dist::chi2_cdf, py::arg("x"), py::arg("df"));
  m.def("chi2_quantile", &dist::chi2_quantile, py::arg("p"), py::arg("df"));

  // solver
  m.def("check_loss", &check_loss, py::arg("u"), py::arg("tau"));

  py::class_<QuantileFit>(m, "QuantileFit")
      .def_readonly("tau", &QuantileFit::tau)
      .def_readonly("coefficients", &QuantileFit::coefficients)
      .def_readonly("residuals", &QuantileFit::residuals)
      .def_readonly("objective", &QuantileFit::objective)
      .def_readonly("iterations", &QuantileFit::iterations);

  m.def(
      "fit_quantile",
      [](const Matrix& x, const Vector& y, double tau, bool intercept) {
        return intercept ? fit_quantile(DesignMatrix::with_intercept(x), y, tau)
                         : fit_quantile(x, y, tau);
      },
      py::arg("x"), py::arg("y"), py::arg("tau"), py::arg("intercept") = false);

  py::class_<OlsFit>(m, "OlsFit")
      .def_readonly("coefficients", &OlsFit::coefficients)
      .def_readonly("fitted", &OlsFit::fitted)
      .def_readonly("residuals", &OlsFit::residuals);

  m.def(
      "fit_ols",
      [](const Matrix& x, const Vector& y, bool intercept) {
        return intercept ? fit_ols(DesignMatrix::with_intercept(x), y) : fit_ols(x, y);
      },
      py::arg("x"), py::arg("y"), py::arg("intercept") = false);

  // instruments
  py::class_<InstrumentSet>(m, "InstrumentSet")
      .def_readonly("z", &InstrumentSet::z)
      .def_readonly("z_tilde", &InstrumentSet::z_tilde)
      .def_readonly("t0", &InstrumentSet::t0)
      .def_readonly("s_a", &InstrumentSet::s_a)
      .def_readonly("s_b", &InstrumentSet::s_b);

  m.def(
      "build_instrument",
      [](const Matrix& x_lag, std::optional<double> c_z, double delta, double lambda) {
        return build_instrument(x_lag, make_iv_config(x_lag.cols(), c_z, delta, lambda));
      },
      py::arg("x_lag"), py::arg("c_z") = std::nullopt, py::arg("delta") = 0.95,
      py::arg("lambda_") = 0.5);
  m.def("split_demean", &split_demean, py::arg("z"), py::arg("lambda_") = 0.5);
  m.def(
      "make_instruments",
      [](const Matrix& x_lag, std::optional<double> c_z, double delta, double lambda) {
        return make_instruments(x_lag, make_iv_config(x_lag.cols(), c_z, delta, lambda));
      },
      py::arg("x_lag"), py::arg("c_z") = std::nullopt, py::arg("delta") = 0.95,
      py::arg("lambda_") = 0.5);

  py::class_<TwoStepFit>(m, "TwoStepFit")
      .def_readonly("beta_hat", &TwoStepFit::beta_hat)
      .def_readonly("gamma_hat", &TwoStepFit::gamma_hat)
      .def_readonly("mu_hat", &TwoStepFit::mu_hat)
      .def_readonly("x_fitted", &TwoStepFit::x_fitted)
      .def_readonly("v_resid", &TwoStepFit::v_resid);

  m.def("two_step_estimate", &two_step_estimate, py::arg("y"), py::arg("x_lag"),
        py::arg("instrument"), py::arg("tau"));

  // density
  m.def(
      "estimate_density_at_zero",
      [](const Vector& y, const Matrix& x_lag, double tau, int m1, int m2,
         std::uint64_t seed) {
        DensityConfig cfg;
        cfg.m1 = m1;
        cfg.m2 = m2;
        cfg.seed = seed;
        return estimate_density_at_zero(y, x_lag, tau, cfg);
      },
      py::arg("y"), py::arg("x_lag"), py::arg("tau"), py::arg("m1") = 100,
      py::arg("m2") = 50, py::arg("seed") = 0);

  // tests over a tau grid: joint plus marginals, Qm two-sided
  m.def(
      "run_tests",
      [](const Vector& y, const Matrix& x_lag, const std::vector<double>& taus,
         std::optional<double> c_z, double delta, double lambda, int m1, int m2,
         std::uint64_t seed) {
        GridTestConfig cfg(x_lag.cols());
        cfg.taus = taus;
        cfg.instrument = make_iv_config(x_lag.cols(), c_z, delta, lambda);
        cfg.density_m1 = m1;
        cfg.density_m2 = m2;
        cfg.seed = seed;
        std::vector<std::string> names;
        for (Index i = 0; i < x_lag.cols(); ++i) names.push_back("x" + std::to_string(i + 1));
        py::list out;
        for (const auto& row : run_test_grid(y, x_lag, names, cfg)) {
          py::dict d = result_to_dict(row.result);
          d["tau"] = row.tau;
          d["hypothesis"] = row.hypothesis;
          out.append(std::move(d));
        }
        return out;
      },
      py::arg("y"), py::arg("x_lag"), py::arg("taus"), py::arg("c_z") = std::nullopt,
      py::arg("delta") = 0.95, py::arg("lambda_") = 0.5, py::arg("m1") = 100,
      py::arg("m2") = 50, py::arg("seed") = 0);

  // simulation
  m.def(
      "simulate_panel",
      [](const std::string& kind, double c, const std::vector<double>& gamma,
         const std::vector<double>& beta, double mu_tau, double tau, Index t_len,
         std::uint64_t seed) {
        const Index k = static_cast<Index>(gamma.size());
        PersistenceSpec p = kind == "WD" ? PersistenceSpec::wd(c, k)
                                         : PersistenceSpec::sd(c, k);
        InnovationSpec innov{
            Eigen::Map<const Vector>(gamma.data(), static_cast<Index>(gamma.size())), seed};
        const Vector beta_vec =
            Eigen::Map<const Vector>(beta.data(), static_cast<Index>(beta.size()));
        auto panel = simulate_panel(p, innov, ErrorSpec::iid(tau), beta_vec, mu_tau, t_len);
        return py::make_tuple(panel.y, panel.x_lag);
      },
      py::arg("kind"), py::arg("c"), py::arg("gamma"), py::arg("beta"),
      py::arg("mu_tau"), py::arg("tau"), py::arg("t_len"), py::arg("seed"));

  m.def("run_simulation_config", &run_simulation_config, py::arg("json_text"),
        "Run a Monte Carlo experiment from JSON; returns (csv, tables)");

  // forecasting
  m.def(
      "qw_crps",
      [](const Matrix& errors, const std::vector<double>& taus, const std::string& scheme) {
        const auto eval = qw_crps(errors, scheme_by_name(scheme), QuantileGrid(taus));
        return py::make_tuple(eval.per_period, eval.qw_c);
      },
      py::arg("errors"), py::arg("taus"), py::arg("scheme") = "center");
  m.def(
      "tail_indicator",
      [](const Matrix& predictions, const std::vector<double>& taus, const std::string& side) {
        return tail_indicator(predictions,
                              side == "left" ? TailSide::Left : TailSide::Right,
                              QuantileGrid(taus));
      },
      py::arg("predictions"), py::arg("taus"), py::arg("side") = "right");

  // predictor construction
  m.def("construct_trend", &construct_trend, py::arg("series"), py::arg("w") = 0.9);
  m.def("construct_cp", &construct_cp, py::arg("forward_rates"), py::arg("avg_rx"));
  m.def("ar1_coefficients", &ar1_coefficients, py::arg("series"));
}
