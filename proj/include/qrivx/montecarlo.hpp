#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qrivx/dgp.hpp"
#include "qrivx/density.hpp"
#include "qrivx/ivx.hpp"
#include "qrivx/stats.hpp"

namespace qrivx {

struct NamedHypothesis {
  std::string name;  // "joint" or "x1", "x2", ...
  Hypothesis hyp;
};

struct McConfig {
  Index t_len = 750;
  int reps = 1000;
  std::vector<double> taus{0.05, 0.25, 0.5, 0.75, 0.95};
  std::vector<PersistenceSpec> persistence;
  std::vector<double> beta_grid{0.0};  // common beta across coefficients
  Index k = 1;
  Vector gamma;
  ErrorSpec error = ErrorSpec::iid(0.5);  // tau_anchor is overwritten per tau
  double mu_tau = 1.0;
  double nominal_size = 0.05;
  std::vector<NamedHypothesis> hypotheses;  // empty -> joint + all marginals
  std::uint64_t seed = 20240701;
  std::optional<double> c_z;  // default -8 - 2K
  double delta = 0.95;
  double lambda = 0.5;
  int density_m1 = 100;
  int density_m2 = 50;
  bool with_ivx = false;  // also tally the raw-instrument statistics
  int threads = 0;        // 0 -> hardware concurrency

  void validate() const;
  std::vector<NamedHypothesis> effective_hypotheses() const;
  InstrumentConfig instrument_config() const;
};

// One tallied cell of the rejection-rate table.
struct McCell {
  std::string stat;
  double tau = 0.0;
  std::string regime;
  double beta = 0.0;
  std::string hypothesis;
  double reject_pct = 0.0;
  double mc_se = 0.0;
  int reps = 0;
};

struct McReport {
  std::vector<McCell> cells;
  int failures = 0;
  double wall_seconds = 0.0;
  std::string config_echo;

  const McCell& cell(const std::string& stat, double tau, const std::string& regime,
                     double beta, const std::string& hypothesis) const;
};

// All statistics of one replication for one (regime, beta) draw. Replications
// share innovations across tau levels and hypotheses; the instrument set is
// built once per draw.
struct TestBundle {
  TestResult l, o, m;
  std::optional<TestResult> ivx;
};

struct RepResults {
  bool failed = false;
  std::string error;
  std::vector<std::vector<TestBundle>> results;  // [tau index][hypothesis index]
};

RepResults run_replication(const McConfig& cfg, const PersistenceSpec& persistence,
                           double beta, std::uint64_t rep_index);

McReport run_experiment(const McConfig& cfg);

// CSV with header stat,tau,regime,beta,hypothesis,reject_pct,mc_se,reps
std::string to_csv(const McReport& report);
// aligned-text tables: tau rows x regime columns when the beta grid is a
// single point, otherwise (regime, tau) rows x beta columns per statistic
std::string to_text(const McReport& report);

}  // namespace qrivx
