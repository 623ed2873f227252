#pragma once

#include "pbj/types.hpp"

namespace pbj {

// Residual projector onto the orthocomplement of col(A), held as a thin
// orthonormal factor Q. Applying it costs O(nk) per vector; the n x n
// projector matrix is never formed.
class ResidualProjector {
 public:
  // Throws ValidationError if A is rank deficient or k >= n. The rank
  // check treats singular values below 1e-10 times the largest as zero.
  explicit ResidualProjector(const Matrix& A);

  // y - Q (Q^T y), column by column.
  Matrix apply(const Matrix& y) const;
  Vector apply(const Vector& y) const;

  const Matrix& q() const { return q_; }
  Index rank() const { return q_.cols(); }

 private:
  Matrix q_;
};

}  // namespace pbj
