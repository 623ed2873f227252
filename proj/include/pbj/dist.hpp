#pragma once

// Thin wrappers over Boost.Math distribution objects so the rest of the
// code deals in plain functions.

namespace pbj::dist {

double f_cdf(double x, int df_num, int df_den);
double f_quantile(double p, int df_num, int df_den);
double chisq_cdf(double x, int df);
double chisq_quantile(double p, int df);
double chisq_sf(double x, int df);  // upper tail
double normal_cdf(double x);
double normal_quantile(double p);

}  // namespace pbj::dist
