#include "pbj/dist.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>

namespace pbj::dist {

double f_cdf(double x, int df_num, int df_den) {
  boost::math::fisher_f d(df_num, df_den);
  return boost::math::cdf(d, x);
}

double f_quantile(double p, int df_num, int df_den) {
  boost::math::fisher_f d(df_num, df_den);
  return boost::math::quantile(d, p);
}

double chisq_cdf(double x, int df) {
  boost::math::chi_squared d(df);
  return boost::math::cdf(d, x);
}

double chisq_quantile(double p, int df) {
  boost::math::chi_squared d(df);
  return boost::math::quantile(d, p);
}

double chisq_sf(double x, int df) {
  boost::math::chi_squared d(df);
  return boost::math::cdf(boost::math::complement(d, x));
}

double normal_cdf(double x) {
  boost::math::normal d;
  return boost::math::cdf(d, x);
}

double normal_quantile(double p) {
  boost::math::normal d;
  return boost::math::quantile(d, p);
}

}  // namespace pbj::dist
