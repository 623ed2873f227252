#include "pbj/transform.hpp"

#include <cmath>
#include <limits>

namespace pbj {

namespace {

double yj_one(double y, double lambda) {
  if (y >= 0.0) {
    if (std::abs(lambda) < 1e-12) return std::log1p(y);
    return (std::pow(y + 1.0, lambda) - 1.0) / lambda;
  }
  const double two_ml = 2.0 - lambda;
  if (std::abs(two_ml) < 1e-12) return -std::log1p(-y);
  return -(std::pow(1.0 - y, two_ml) - 1.0) / two_ml;
}

double yj_one_inverse(double z, double lambda) {
  if (z >= 0.0) {
    if (std::abs(lambda) < 1e-12) return std::expm1(z);
    return std::pow(lambda * z + 1.0, 1.0 / lambda) - 1.0;
  }
  const double two_ml = 2.0 - lambda;
  if (std::abs(two_ml) < 1e-12) return -std::expm1(-z);
  return 1.0 - std::pow(1.0 - two_ml * z, 1.0 / two_ml);
}

// Gaussian profile log-likelihood of the transformed data, including the
// log-Jacobian term (lambda - 1) * sum sign(y) log(|y| + 1).
double profile_loglik(const Vector& y, double lambda) {
  const auto n = static_cast<double>(y.size());
  Vector z = yeo_johnson(y, lambda);
  const double mean = z.mean();
  const double var = (z.array() - mean).square().sum() / n;
  if (var <= 0.0 || !std::isfinite(var)) return -std::numeric_limits<double>::infinity();
  double jac = 0.0;
  for (Index i = 0; i < y.size(); ++i)
    jac += (y[i] >= 0.0 ? 1.0 : -1.0) * std::log1p(std::abs(y[i]));
  return -0.5 * n * std::log(var) + (lambda - 1.0) * jac;
}

}  // namespace

Vector yeo_johnson(const Vector& y, double lambda) {
  if (!y.allFinite()) throw ValidationError("non-finite input to yeo_johnson");
  Vector out(y.size());
  for (Index i = 0; i < y.size(); ++i) out[i] = yj_one(y[i], lambda);
  return out;
}

Vector yeo_johnson_inverse(const Vector& z, double lambda) {
  Vector out(z.size());
  for (Index i = 0; i < z.size(); ++i) out[i] = yj_one_inverse(z[i], lambda);
  return out;
}

YeoJohnsonFit yeo_johnson_mle(const Vector& y) {
  if (y.size() < 10) throw ValidationError("yeo_johnson_mle needs n >= 10");
  if ((y.array() - y[0]).abs().maxCoeff() == 0.0)
    throw ValidationError("yeo_johnson_mle: constant input, likelihood is flat");

  // Golden-section search; profile likelihood is unimodal in practice.
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = -3.0, b = 3.0;
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = profile_loglik(y, c);
  double fd = profile_loglik(y, d);
  while (b - a > 1e-4) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = profile_loglik(y, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = profile_loglik(y, d);
    }
  }
  YeoJohnsonFit fit;
  fit.lambda = 0.5 * (a + b);
  fit.logLik = profile_loglik(y, fit.lambda);
  return fit;
}

}  // namespace pbj
