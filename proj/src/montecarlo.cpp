#include "qrivx/montecarlo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "parallel.hpp"

namespace qrivx {

namespace {

std::string fmt(double v, const char* spec = "%g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

}  // namespace

void McConfig::validate() const {
  if (reps < 1) throw ParameterError("McConfig: reps must be >= 1");
  if (!(nominal_size > 0.0 && nominal_size < 1.0))
    throw ParameterError("McConfig: nominal size must lie in (0,1)");
  if (taus.empty()) throw ParameterError("McConfig: empty tau grid");
  for (double tau : taus)
    if (!(tau > 0.0 && tau < 1.0)) throw ParameterError("McConfig: tau outside (0,1)");
  if (persistence.empty()) throw ParameterError("McConfig: empty persistence grid");
  for (const auto& p : persistence) {
    p.validate();
    if (p.c.size() != k) throw ContractError("McConfig: persistence dimension != K");
  }
  if (gamma.size() != k) throw ContractError("McConfig: gamma length != K");
  if (beta_grid.empty()) throw ParameterError("McConfig: empty beta grid");
  instrument_config().validate();
  for (const auto& h : hypotheses) h.hyp.validate(k);
}

std::vector<NamedHypothesis> McConfig::effective_hypotheses() const {
  if (!hypotheses.empty()) return hypotheses;
  std::vector<NamedHypothesis> out;
  if (k > 1) out.push_back({"joint", Hypothesis::joint(k)});
  for (Index i = 0; i < k; ++i)
    out.push_back({"x" + std::to_string(i + 1), Hypothesis::marginal(i, k)});
  return out;
}

InstrumentConfig McConfig::instrument_config() const {
  InstrumentConfig cfg(k);
  if (c_z) cfg.c_z = *c_z;
  cfg.delta = delta;
  cfg.lambda = lambda;
  return cfg;
}

const McCell& McReport::cell(const std::string& stat, double tau,
                             const std::string& regime, double beta,
                             const std::string& hypothesis) const {
  for (const auto& c : cells) {
    if (c.stat == stat && c.regime == regime && c.hypothesis == hypothesis &&
        std::abs(c.tau - tau) < 1e-12 && std::abs(c.beta - beta) < 1e-12)
      return c;
  }
  throw ContractError("McReport: no such cell " + stat + "/" + regime + "/" + hypothesis);
}

RepResults run_replication(const McConfig& cfg, const PersistenceSpec& persistence,
                           double beta, std::uint64_t rep_index) {
  const auto hyps = cfg.effective_hypotheses();
  RepResults out;
  out.results.resize(cfg.taus.size());

  const Rng root = Rng(cfg.seed).stream(rep_index);
  InnovationSpec innov{cfg.gamma, root.stream(0).seed()};
  const Vector beta_vec = Vector::Constant(cfg.k, beta);

  try {
    // innovations and predictors are shared across tau levels
    Innovations draws = gen_innovations(innov, cfg.t_len, cfg.k);
    const Matrix x = gen_predictors(persistence, draws.v);
    Matrix x_lag = Matrix::Zero(cfg.t_len, cfg.k);
    x_lag.bottomRows(cfg.t_len - 1) = x.topRows(cfg.t_len - 1);

    const InstrumentSet iv = make_instruments(x_lag, cfg.instrument_config());

    for (std::size_t ti = 0; ti < cfg.taus.size(); ++ti) {
      const double tau = cfg.taus[ti];
      ErrorSpec err = cfg.error;
      err.tau_anchor = tau;
      const Vector y = gen_response(x_lag, beta_vec, cfg.mu_tau, draws.zeta, err);

      DensityConfig dens;
      dens.m1 = cfg.density_m1;
      dens.m2 = cfg.density_m2;
      dens.seed = root.stream(1 + ti).seed();

      AnalyzeOptions opts;
      opts.with_ivx = cfg.with_ivx;
      const TauContext ctx = analyze_tau(y, x_lag, iv, tau, dens, cfg.delta, opts);

      out.results[ti].reserve(hyps.size());
      for (const auto& nh : hyps) {
        TestBundle bundle;
        bundle.l = q_l(ctx, nh.hyp);
        bundle.o = q_o(ctx, nh.hyp);
        bundle.m = q_m(bundle.l, bundle.o, cfg.t_len, cfg.delta);
        if (cfg.with_ivx) bundle.ivx = q_ivx(ctx, nh.hyp);
        out.results[ti].push_back(std::move(bundle));
      }
    }
  } catch (const std::exception& e) {
    out.failed = true;
    out.error = e.what();
    out.results.clear();
  }
  return out;
}

McReport run_experiment(const McConfig& cfg) {
  cfg.validate();
  const auto t_start = std::chrono::steady_clock::now();
  const auto hyps = cfg.effective_hypotheses();

  std::vector<std::string> stat_names{"Ql", "Qo", "Qm"};
  if (cfg.with_ivx) stat_names.push_back("Qivx");

  // flat tally layout: [regime][beta][tau][hyp][stat]
  const std::size_t n_stats = stat_names.size();
  const std::size_t cells_per_rep = cfg.taus.size() * hyps.size() * n_stats;

  McReport report;
  std::ostringstream echo;
  echo << "T=" << cfg.t_len << " reps=" << cfg.reps << " K=" << cfg.k
       << " seed=" << cfg.seed << " c_z=" << cfg.instrument_config().c_z
       << " delta=" << cfg.delta << " lambda=" << cfg.lambda
       << " M1=" << cfg.density_m1 << " M2=" << cfg.density_m2
       << " nominal=" << cfg.nominal_size;
  report.config_echo = echo.str();

  for (const auto& regime : cfg.persistence) {
    for (double beta : cfg.beta_grid) {
      std::vector<std::uint8_t> rejected(static_cast<std::size_t>(cfg.reps) * cells_per_rep, 0);
      std::vector<std::uint8_t> failed(cfg.reps, 0);

      detail::parallel_for(static_cast<std::size_t>(cfg.reps), cfg.threads, [&](std::size_t r) {
        const RepResults res = run_replication(cfg, regime, beta, r);
        if (res.failed) {
          failed[r] = 1;
          return;
        }
        std::size_t slot = r * cells_per_rep;
        for (std::size_t ti = 0; ti < cfg.taus.size(); ++ti) {
          for (std::size_t hi = 0; hi < hyps.size(); ++hi) {
            const TestBundle& b = res.results[ti][hi];
            const TestResult* per_stat[4] = {&b.l, &b.o, &b.m,
                                             b.ivx ? &*b.ivx : nullptr};
            for (std::size_t si = 0; si < n_stats; ++si) {
              const TestResult* tr = per_stat[si];
              rejected[slot++] = (tr && tr->p_value < cfg.nominal_size) ? 1 : 0;
            }
          }
        }
      });

      int n_failed = 0;
      for (std::uint8_t f : failed) n_failed += f;
      report.failures += n_failed;
      if (n_failed > 0.01 * cfg.reps)
        throw Error("run_experiment: replication failure rate above 1% (" +
                    std::to_string(n_failed) + "/" + std::to_string(cfg.reps) + ")");
      const int n_ok = cfg.reps - n_failed;

      for (std::size_t ti = 0; ti < cfg.taus.size(); ++ti) {
        for (std::size_t hi = 0; hi < hyps.size(); ++hi) {
          for (std::size_t si = 0; si < n_stats; ++si) {
            long count = 0;
            const std::size_t offset = (ti * hyps.size() + hi) * n_stats + si;
            for (int r = 0; r < cfg.reps; ++r)
              if (!failed[r]) count += rejected[r * cells_per_rep + offset];
            const double phat = n_ok > 0 ? static_cast<double>(count) / n_ok : 0.0;
            McCell cell;
            cell.stat = stat_names[si];
            cell.tau = cfg.taus[ti];
            cell.regime = regime.label;
            cell.beta = beta;
            cell.hypothesis = hyps[hi].name;
            cell.reject_pct = 100.0 * phat;
            cell.mc_se = 100.0 * std::sqrt(phat * (1.0 - phat) / std::max(1, n_ok));
            cell.reps = n_ok;
            report.cells.push_back(std::move(cell));
          }
        }
      }
    }
  }

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return report;
}

std::string to_csv(const McReport& report) {
  std::ostringstream out;
  out << "stat,tau,regime,beta,hypothesis,reject_pct,mc_se,reps\n";
  for (const auto& c : report.cells) {
    out << c.stat << ',' << fmt(c.tau) << ',' << c.regime << ',' << fmt(c.beta)
        << ',' << c.hypothesis << ',' << fmt(c.reject_pct, "%.4f") << ','
        << fmt(c.mc_se, "%.4f") << ',' << c.reps << '\n';
  }
  return out.str();
}

std::string to_text(const McReport& report) {
  std::ostringstream out;
  // collect axis values in first-seen order
  std::vector<std::string> stats, regimes, hyps;
  std::vector<double> taus, betas;
  auto push_unique = [](auto& vec, const auto& v) {
    if (std::find(vec.begin(), vec.end(), v) == vec.end()) vec.push_back(v);
  };
  for (const auto& c : report.cells) {
    push_unique(stats, c.stat);
    push_unique(regimes, c.regime);
    push_unique(hyps, c.hypothesis);
    push_unique(taus, c.tau);
    push_unique(betas, c.beta);
  }
  const bool size_layout = betas.size() == 1;

  for (const auto& stat : stats) {
    for (const auto& hyp : hyps) {
      out << "== " << stat << "  H0: " << hyp << "  (rejection %, "
          << report.config_echo << ")\n";
      if (size_layout) {
        char head[64];
        std::snprintf(head, sizeof(head), "%8s", "tau");
        out << head;
        for (const auto& reg : regimes) {
          std::snprintf(head, sizeof(head), " %14s", reg.c_str());
          out << head;
        }
        out << '\n';
        for (double tau : taus) {
          char buf[64];
          std::snprintf(buf, sizeof(buf), "%8g", tau);
          out << buf;
          for (const auto& reg : regimes) {
            std::snprintf(buf, sizeof(buf), " %14.1f",
                          report.cell(stat, tau, reg, betas[0], hyp).reject_pct);
            out << buf;
          }
          out << '\n';
        }
      } else {
        char head[64];
        std::snprintf(head, sizeof(head), "%-14s %8s", "regime", "tau");
        out << head;
        for (double beta : betas) {
          std::snprintf(head, sizeof(head), " %10g", beta);
          out << head;
        }
        out << '\n';
        for (const auto& reg : regimes) {
          for (double tau : taus) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%-14s %8g", reg.c_str(), tau);
            out << buf;
            for (double beta : betas) {
              std::snprintf(buf, sizeof(buf), " %10.1f",
                            report.cell(stat, tau, reg, beta, hyp).reject_pct);
              out << buf;
            }
            out << '\n';
          }
        }
      }
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace qrivx
