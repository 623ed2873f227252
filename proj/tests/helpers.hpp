#pragma once

#include "pbj/types.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace testutil {

// One-sample Kolmogorov-Smirnov p-value against a given CDF, using the
// asymptotic Kolmogorov distribution.
inline double ks_pvalue(std::vector<double> sample,
                        const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const auto n = static_cast<double>(sample.size());
  double d = 0.0;
  for (size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  const double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
  double p = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    p += sign * 2.0 * std::exp(-2.0 * k * k * lambda * lambda);
    sign = -sign;
  }
  return std::clamp(p, 0.0, 1.0);
}

inline pbj::Matrix random_matrix(pbj::Index rows, pbj::Index cols,
                                 std::mt19937_64& gen) {
  std::normal_distribution<double> normal;
  pbj::Matrix out(rows, cols);
  for (pbj::Index i = 0; i < rows; ++i)
    for (pbj::Index j = 0; j < cols; ++j) out(i, j) = normal(gen);
  return out;
}

// Dense residual projector via normal equations; the brute-force oracle.
inline pbj::Matrix dense_residual_projector(const pbj::Matrix& A) {
  const pbj::Matrix inner = (A.transpose() * A).inverse();
  return pbj::Matrix::Identity(A.rows(), A.rows()) - A * inner * A.transpose();
}

}  // namespace testutil
