#include "pbj/projector.hpp"

#include <sstream>

namespace pbj {

namespace {
constexpr double kRankTol = 1e-10;
}

ResidualProjector::ResidualProjector(const Matrix& A) {
  const Index n = A.rows();
  const Index k = A.cols();
  if (k >= n) {
    std::ostringstream msg;
    msg << "projector basis must be tall: got " << n << " x " << k;
    throw ValidationError(msg.str());
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(A);
  qr.setThreshold(kRankTol);
  if (qr.rank() < k) {
    // Columns permuted past the numerical rank are the dependent ones.
    std::ostringstream msg;
    msg << "rank-deficient basis (rank " << qr.rank() << " of " << k
        << "); dependent columns:";
    const auto& perm = qr.colsPermutation().indices();
    for (Index j = qr.rank(); j < k; ++j) msg << ' ' << perm[j];
    throw ValidationError(msg.str());
  }
  q_ = qr.householderQ() * Matrix::Identity(n, k);
}

Matrix ResidualProjector::apply(const Matrix& y) const {
  return y - q_ * (q_.transpose() * y);
}

Vector ResidualProjector::apply(const Vector& y) const {
  return y - q_ * (q_.transpose() * y);
}

}  // namespace pbj
