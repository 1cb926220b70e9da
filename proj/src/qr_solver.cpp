#include "qrivx/qr_solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <cmath>
#include <limits>

#ifdef QRIVX_HAVE_OPENBLAS
extern "C" {
void cblas_dsyrk(int order, int uplo, int trans, int n, int k, double alpha,
                 const double* a, int lda, double beta, double* c, int ldc);
void openblas_set_num_threads(int);
}
namespace {
// CblasColMajor=102, CblasLower=122, CblasTrans=112
constexpr int kColMajor = 102, kLower = 122, kTrans = 112;
// callers parallelize over fits, not within; deferred to first use because
// spawning the BLAS thread pool under the loader lock can deadlock
void ensure_single_threaded_blas() {
  static const bool once = [] {
    openblas_set_num_threads(1);
    return true;
  }();
  (void)once;
}
}  // namespace
#endif

namespace qrivx {

namespace {

void validate_design(const Matrix& x, Index t_len) {
  if (x.rows() != t_len) throw ContractError("design and response lengths differ");
  if (x.rows() <= x.cols())
    throw SingularDesignError("design needs more rows than columns");
  if (!x.allFinite()) throw ParameterError("design contains non-finite values");
  for (Index j = 0; j < x.cols(); ++j) {
    if (x.col(j).cwiseAbs().maxCoeff() == 0.0)
      throw SingularDesignError("design column is identically zero");
  }
}

double objective_of(const Vector& resid, double tau) {
  double s = 0.0;
  for (Index t = 0; t < resid.size(); ++t) s += check_loss(resid[t], tau);
  return s;
}

}  // namespace

double check_loss(double u, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw ParameterError("check_loss: tau must lie in (0,1)");
  return u * (tau - (u < 0.0 ? 1.0 : 0.0));
}

DesignMatrix DesignMatrix::raw(Matrix x) { return DesignMatrix{std::move(x), false}; }

DesignMatrix DesignMatrix::with_intercept(const Matrix& x) {
  Matrix v(x.rows(), x.cols() + 1);
  v.col(0).setOnes();
  v.rightCols(x.cols()) = x;
  return DesignMatrix{std::move(v), true};
}

QuantileFit fit_quantile(const Matrix& x, const Vector& y, double tau,
                         const QrSolverOptions& opts) {
  if (!(tau > 0.0 && tau < 1.0)) throw ParameterError("fit_quantile: tau must lie in (0,1)");
  validate_design(x, y.size());
  const Index n = x.rows();
  const Index p = x.cols();

  // dual LP: max y'a  s.t.  X'a = (1-tau) X'1,  0 <= a <= 1.
  // Mehrotra predictor-corrector; the regression coefficients are the
  // negated multipliers of the equality constraints.
  const Vector b = (1.0 - tau) * (x.transpose() * Vector::Ones(n));
  const Vector c = -y;

  Vector a = Vector::Constant(n, 1.0 - tau);
  Vector s = Vector::Constant(n, tau);

  Matrix xs(n, p);    // row-scaled copy of x
  Matrix ada(p, p);
  Eigen::LLT<Matrix, Eigen::Lower> llt(p);

#ifdef QRIVX_HAVE_OPENBLAS
  ensure_single_threaded_blas();
#endif
  auto factor_weighted_gram = [&](const Vector& d) {
    xs.noalias() = d.cwiseSqrt().asDiagonal() * x;
#ifdef QRIVX_HAVE_OPENBLAS
    cblas_dsyrk(kColMajor, kLower, kTrans, static_cast<int>(p), static_cast<int>(n),
                1.0, xs.data(), static_cast<int>(n), 0.0, ada.data(),
                static_cast<int>(p));
#else
    ada.setZero();
    ada.template selfadjointView<Eigen::Lower>().rankUpdate(xs.transpose());
#endif
    llt.compute(ada);
    if (llt.info() != Eigen::Success)
      throw SingularDesignError("fit_quantile: weighted Gram matrix not positive definite (rank-deficient design)");
  };

  // initial dual point from the unweighted least squares direction
  factor_weighted_gram(Vector::Ones(n));
  Vector dual = llt.solve(x.transpose() * c);
  Vector resid_c = c - x * dual;

  Vector z(n), w(n);
  const double eps0 = 1e-10;
  for (Index i = 0; i < n; ++i) {
    const double bump = (std::abs(resid_c[i]) < eps0) ? eps0 : 0.0;
    z[i] = std::max(resid_c[i], 0.0) + bump;
    w[i] = std::max(-resid_c[i], 0.0) + bump;
  }

  double gap = z.dot(a) + w.dot(s);
  const double big = std::numeric_limits<double>::max();

  Vector d(n), dz(n), dw(n), da(n), ds(n), dr(n), u_vec(n), rhs(p), dy(p);
  int it = 0;
  auto relative_gap_ok = [&]() {
    return gap <= opts.gap_tolerance * (1.0 + std::abs(c.dot(a)));
  };

  while (!relative_gap_ok() && it < opts.max_iterations) {
    ++it;
    for (Index i = 0; i < n; ++i) {
      d[i] = 1.0 / (z[i] / a[i] + w[i] / s[i]);
      ds[i] = z[i] - w[i];
      dz[i] = d[i] * ds[i];
    }

    dy = b - x.transpose() * a + x.transpose() * dz;
    rhs = dy;
    factor_weighted_gram(d);
    dy = llt.solve(dy);

    ds = x * dy - ds;

    double deltap = big, deltad = big;
    for (Index i = 0; i < n; ++i) {
      da[i] = d[i] * ds[i];
      ds[i] = -da[i];
      dz[i] = -z[i] * (da[i] / a[i] + 1.0);
      dw[i] = -w[i] * (ds[i] / s[i] + 1.0);
      if (da[i] < 0.0) deltap = std::min(deltap, -a[i] / da[i]);
      if (ds[i] < 0.0) deltap = std::min(deltap, -s[i] / ds[i]);
      if (dz[i] < 0.0) deltad = std::min(deltad, -z[i] / dz[i]);
      if (dw[i] < 0.0) deltad = std::min(deltad, -w[i] / dw[i]);
    }
    deltap = std::min(opts.step_factor * deltap, 1.0);
    deltad = std::min(opts.step_factor * deltad, 1.0);

    if (std::min(deltap, deltad) < 1.0) {
      // corrector step reusing the factorization
      double mu = z.dot(a) + w.dot(s);
      const double g = mu + deltap * da.dot(z) + deltad * dz.dot(a) +
                       deltap * deltad * da.dot(dz) + deltap * ds.dot(w) +
                       deltad * dw.dot(s) + deltap * deltad * ds.dot(dw);
      mu = mu * std::pow(g / mu, 3) / (2.0 * static_cast<double>(n));

      for (Index i = 0; i < n; ++i)
        dr[i] = d[i] * (mu * (1.0 / s[i] - 1.0 / a[i]) + da[i] * dz[i] / a[i] -
                        ds[i] * dw[i] / s[i]);
      dy = llt.solve(rhs + x.transpose() * dr);
      u_vec = x * dy;

      deltap = big;
      deltad = big;
      for (Index i = 0; i < n; ++i) {
        const double dadz = da[i] * dz[i];
        const double dsdw = ds[i] * dw[i];
        da[i] = d[i] * (u_vec[i] - z[i] + w[i]) - dr[i];
        ds[i] = -da[i];
        dz[i] = -z[i] + (mu - z[i] * da[i] - dadz) / a[i];
        dw[i] = -w[i] + (mu - w[i] * ds[i] - dsdw) / s[i];
        if (da[i] < 0.0) deltap = std::min(deltap, -a[i] / da[i]);
        if (ds[i] < 0.0) deltap = std::min(deltap, -s[i] / ds[i]);
        if (dz[i] < 0.0) deltad = std::min(deltad, -z[i] / dz[i]);
        if (dw[i] < 0.0) deltad = std::min(deltad, -w[i] / dw[i]);
      }
      deltap = std::min(opts.step_factor * deltap, 1.0);
      deltad = std::min(opts.step_factor * deltad, 1.0);
    }

    a += deltap * da;
    s += deltap * ds;
    dual += deltad * dy;
    z += deltad * dz;
    w += deltad * dw;
    gap = z.dot(a) + w.dot(s);
  }

  QuantileFit fit;
  fit.tau = tau;
  fit.coefficients = -dual;
  fit.residuals = y - x * fit.coefficients;
  fit.objective = objective_of(fit.residuals, tau);
  fit.iterations = it;

  if (!relative_gap_ok())
    throw ConvergenceError("fit_quantile: duality gap " + std::to_string(gap) +
                               " after " + std::to_string(it) + " iterations",
                           fit);
  return fit;
}

QuantileFit fit_quantile(const DesignMatrix& x, const Vector& y, double tau,
                         const QrSolverOptions& opts) {
  return fit_quantile(x.values, y, tau, opts);
}

OlsFit fit_ols(const Matrix& x, const Vector& y) {
  validate_design(x, y.size());
  Eigen::ColPivHouseholderQR<Matrix> qr(x);
  if (qr.rank() < x.cols())
    throw SingularDesignError("fit_ols: design is rank deficient");
  OlsFit fit;
  fit.coefficients = qr.solve(y);
  fit.fitted = x * fit.coefficients;
  fit.residuals = y - fit.fitted;
  return fit;
}

OlsFit fit_ols(const DesignMatrix& x, const Vector& y) { return fit_ols(x.values, y); }

MultiOlsFit fit_ols(const Matrix& x, const Matrix& ys) {
  validate_design(x, ys.rows());
  Eigen::ColPivHouseholderQR<Matrix> qr(x);
  if (qr.rank() < x.cols())
    throw SingularDesignError("fit_ols: design is rank deficient");
  MultiOlsFit fit;
  fit.coefficients = qr.solve(ys);
  fit.fitted = x * fit.coefficients;
  fit.residuals = ys - fit.fitted;
  return fit;
}

}  // namespace qrivx
