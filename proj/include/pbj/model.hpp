#pragma once

#include "pbj/projector.hpp"
#include "pbj/types.hpp"

#include <memory>

namespace pbj {

// Partitioned design: nuisance block X0, tested block X1. The stacked
// matrix [X0 X1] must have full column rank with n > m0 + m1.
class Design {
 public:
  Design(Matrix X0, Matrix X1);

  const Matrix& x0() const { return X0_; }
  const Matrix& x1() const { return X1_; }
  const Matrix& x() const { return X_; }
  Index n() const { return X_.rows(); }
  Index m0() const { return X0_.cols(); }
  Index m1() const { return X1_.cols(); }
  Index m() const { return X_.cols(); }

  const ResidualProjector& fullProjector() const { return *projFull_; }
  const ResidualProjector& reducedProjector() const { return *projReduced_; }

 private:
  Matrix X0_, X1_, X_;
  std::shared_ptr<const ResidualProjector> projFull_, projReduced_;
};

struct FitResult {
  Matrix residualsFull;     // R_X Y
  Matrix residualsReduced;  // R_{X0} Y
  Matrix coefficients;      // m x V least-squares solutions
  Vector sigma2;            // ||R_X Y_v||^2 / (n - m)
  std::vector<char> degenerate;

  Index V() const { return residualsFull.cols(); }
};

struct StatisticVector {
  Vector F;
  Vector Z;
  int dfNum = 0;
  int dfDen = 0;
};

FitResult fit_family(const Outcomes& outcomes, const Design& design);

// F_v = (n-m) (||R_{X0} Y_v||^2 - ||R_X Y_v||^2) / (m1 ||R_X Y_v||^2).
// Degenerate locations get F = 0 and keep their flag.
StatisticVector f_statistics(const FitResult& fit, const Design& design);

// Z_v = invCDF_{chi2(dfNum)}( CDF_{F(dfNum, dfDen)}(F_v) ), with the CDF
// value clamped into [1e-16, 1 - 1e-16] before inversion.
Vector f_to_chisq(const Vector& F, int dfNum, int dfDen);

}  // namespace pbj
