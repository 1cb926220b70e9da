#pragma once

#include "qrivx/types.hpp"

// Distribution functions needed by the test statistics. The chi-square side
// is built on the regularized incomplete gamma (series + continued fraction),
// the normal side on the error function; quantiles invert the CDFs with
// safeguarded Newton steps. Accuracy is ~1e-14 over the ranges used here.
namespace qrivx::dist {

double norm_pdf(double x);
double norm_cdf(double x);
double norm_sf(double x);        // 1 - cdf, computed without cancellation
double norm_quantile(double p);  // p in (0,1)

// Regularized incomplete gamma P(a,x) and Q(a,x) = 1 - P(a,x), a > 0, x >= 0.
double gamma_p(double a, double x);
double gamma_q(double a, double x);

double chi2_cdf(double x, double df);
double chi2_sf(double x, double df);
double chi2_quantile(double p, double df);

}  // namespace qrivx::dist
