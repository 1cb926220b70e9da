#include <doctest.h>

#include <cmath>

#include "qrivx/csv.hpp"
#include "qrivx/dataset.hpp"
#include "qrivx/dgp.hpp"
#include "qrivx/predictors.hpp"
#include "qrivx/rng.hpp"

using namespace qrivx;

TEST_CASE("trend recursion") {
  SUBCASE("single-term value at t=2") {
    Vector s(3);
    s << 5.0, 0.0, 0.0;
    const Vector trend = construct_trend(s, 0.9);
    CHECK(trend[0] == 0.0);
    CHECK(trend[1] == doctest::Approx(0.45).epsilon(1e-14));
  }
  SUBCASE("constant series follows the geometric sum") {
    const double c = 2.0, w = 0.9;
    const Vector trend = construct_trend(Vector::Constant(120, c), w);
    for (Index t = 1; t < 120; ++t) {
      const double expect = c * w * (1.0 - std::pow(w, static_cast<double>(t)));
      CHECK(trend[t] == doctest::Approx(expect).epsilon(1e-12));
    }
    CHECK(trend[119] == doctest::Approx(c * w).epsilon(1e-4));
  }
  SUBCASE("recursion equals the direct weighted sum") {
    Rng rng(8);
    const Index n = 500;
    const Vector s = rng.normal_vector(n);
    const double w = 0.9;
    const Vector trend = construct_trend(s, w);
    for (Index t : {1, 2, 17, 100, 499}) {
      double direct = 0.0;
      for (Index i = 1; i <= t; ++i) direct += std::pow(w, static_cast<double>(i)) * s[t - i];
      direct *= 1.0 - w;
      CHECK(trend[t] == doctest::Approx(direct).epsilon(1e-12));
    }
  }
  SUBCASE("smoothing validation") {
    CHECK_THROWS_AS(construct_trend(Vector::Ones(5), 0.0), ParameterError);
    CHECK_THROWS_AS(construct_trend(Vector::Ones(5), 1.0), ParameterError);
  }
}

TEST_CASE("cp factor construction") {
  Rng rng(12);
  const Index n = 200;
  const Matrix forwards = rng.normal_matrix(n, 5);
  SUBCASE("returns in the span are reproduced exactly") {
    Vector coef(5);
    coef << 0.5, -1, 2, 0.3, 1.1;
    const Vector avg_rx = (forwards * coef).array() + 0.7;
    const Vector cp = construct_cp(forwards, avg_rx);
    CHECK((cp - avg_rx).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("fitted values match the normal equations") {
    const Vector avg_rx = rng.normal_vector(n);
    const Vector cp = construct_cp(forwards, avg_rx);
    Matrix design(n, 6);
    design.col(0).setOnes();
    design.rightCols(5) = forwards;
    const Vector direct = design * (design.transpose() * design)
                                       .ldlt()
                                       .solve(design.transpose() * avg_rx);
    CHECK((cp - direct).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("duplicated forward columns are singular") {
    Matrix dup = forwards;
    dup.col(4) = dup.col(3);
    CHECK_THROWS_AS(construct_cp(dup, rng.normal_vector(n)), SingularDesignError);
  }
}

TEST_CASE("ar1 diagnostics on a simulated unit root") {
  InnovationSpec innov{Vector::Zero(1), 2024};
  const Innovations draws = gen_innovations(innov, 750, 1);
  const Matrix x = gen_predictors(PersistenceSpec::sd(0.0, 1), draws.v);
  const Vector slopes = ar1_coefficients(x);
  CHECK(std::abs(slopes[0] - 1.0) < 0.02);
}

TEST_CASE("csv parsing") {
  SUBCASE("round trip of a small table") {
    const CsvTable t = parse_csv("date,a,b\n2001-01,1.5,2\n2001-02,-0.5,3\n", "mem");
    CHECK(t.header.size() == 3);
    CHECK(t.rows.size() == 2);
    CHECK(t.column_numeric("a")[1] == doctest::Approx(-0.5));
    CHECK(t.column_text("date")[0] == "2001-01");
    CHECK_THROWS_AS(t.column_numeric("zzz"), DataError);
  }
  SUBCASE("malformed inputs carry the offending location") {
    CHECK_THROWS_AS(parse_csv("", "mem"), DataError);
    CHECK_THROWS_AS(parse_csv("a,b\n1\n", "mem"), DataError);
    const CsvTable missing = parse_csv("a,b\n1,\n", "mem");
    CHECK_THROWS_AS(missing.column_numeric("b"), DataError);
    const CsvTable text = parse_csv("a,b\n1,x\n", "mem");
    CHECK_THROWS_AS(text.column_numeric("b"), DataError);
  }
}

TEST_CASE("data file date validation") {
  const std::string good = "date,v\n2001-11,1\n2001-12,2\n2002-01,3\n";
  write_text_file("/tmp/qrivx_good.csv", good);
  const DataFile file = load_data_file("/tmp/qrivx_good.csv");
  CHECK(file.rows() == 3);

  write_text_file("/tmp/qrivx_gap.csv", "date,v\n2001-11,1\n2002-01,2\n");
  CHECK_THROWS_AS(load_data_file("/tmp/qrivx_gap.csv"), DataError);
  write_text_file("/tmp/qrivx_fmt.csv", "date,v\n2001/11,1\n2001/12,2\n");
  CHECK_THROWS_AS(load_data_file("/tmp/qrivx_fmt.csv"), DataError);
}

TEST_CASE("panel construction aligns lags") {
  // hand-checkable file: y_t should pair with raw_{t-1} and trend_t
  const std::string csv =
      "date,y,raw,incr,F1,F2\n"
      "2000-01,10,1,5,1,0\n"
      "2000-02,20,2,0,0,1\n"
      "2000-03,30,3,0,1,1\n"
      "2000-04,40,4,0,0,0\n"
      "2000-05,45,5,0,1,0.5\n"
      "2000-06,55,6,0,0.5,1\n";
  write_text_file("/tmp/qrivx_panel.csv", csv);
  const DataFile file = load_data_file("/tmp/qrivx_panel.csv");

  PanelSpec spec;
  spec.response = "y";
  spec.avg_rx_columns = {"y"};
  PredictorSpec raw{"raw", PredictorSpec::Kind::RawLagged, "raw", 0.9, {}};
  PredictorSpec trend{"TI", PredictorSpec::Kind::Trend, "incr", 0.9, {}};
  PredictorSpec cp{"CP", PredictorSpec::Kind::CpFactor, "", 0.9, {"F1", "F2"}};
  spec.predictors = {raw, trend, cp};

  const BuiltPanel panel = build_panel(file, spec);
  REQUIRE(panel.y.size() == 5);
  CHECK(panel.y[0] == 20.0);
  CHECK(panel.periods.front() == "2000-02");
  // raw lag: x_lag row for 2000-02 holds the 2000-01 value
  CHECK(panel.x_lag(0, 0) == 1.0);
  CHECK(panel.x_lag(2, 0) == 3.0);
  CHECK(panel.x_lag(4, 0) == 5.0);
  // trend at period t uses increments through t-1
  CHECK(panel.x_lag(0, 1) == doctest::Approx(0.9 * 0.1 * 5.0).epsilon(1e-12));
  CHECK(panel.x_lag(1, 1) == doctest::Approx(0.9 * (0.45 + 0.0)).epsilon(1e-12));
  // CP column: fitted value of avg_rx on lagged forwards, rows aligned with y
  Matrix fwd(5, 2);
  fwd << 1, 0, 0, 1, 1, 1, 0, 0, 1, 0.5;
  Vector avg(5);
  avg << 20, 30, 40, 45, 55;
  const Vector cp_direct = construct_cp(fwd, avg);
  CHECK((panel.x_lag.col(2) - cp_direct).cwiseAbs().maxCoeff() < 1e-10);

  PanelSpec missing = spec;
  missing.response = "nope";
  CHECK_THROWS_AS(build_panel(file, missing), DataError);
}
