#pragma once

#include "pbj/types.hpp"

namespace pbj {

struct YeoJohnsonFit {
  double lambda = 1.0;
  double logLik = 0.0;
};

// Single-parameter monotone power transform that accepts negative values.
// lambda = 1 is the identity.
Vector yeo_johnson(const Vector& y, double lambda);

// Inverse transform, elementwise.
Vector yeo_johnson_inverse(const Vector& z, double lambda);

// Profile-likelihood fit of lambda by golden-section search over [-3, 3]
// to tolerance 1e-4. Throws ValidationError for constant input or n < 10.
YeoJohnsonFit yeo_johnson_mle(const Vector& y);

}  // namespace pbj
