#include "pbj/model.hpp"

#include "pbj/dist.hpp"

#include <cmath>
#include <sstream>

namespace pbj {

namespace {
// Relative floor under which a residual sum of squares counts as zero.
constexpr double kDegenerateTol = 1e-14;
constexpr double kCdfEps = 1e-16;
}  // namespace

Design::Design(Matrix X0, Matrix X1)
    : X0_(std::move(X0)), X1_(std::move(X1)) {
  if (X1_.cols() < 1) throw ValidationError("X1 must have at least one column");
  if (X0_.rows() != X1_.rows())
    throw ValidationError("X0 and X1 row counts differ");
  X_.resize(X0_.rows(), X0_.cols() + X1_.cols());
  X_ << X0_, X1_;
  if (X_.rows() <= X_.cols()) {
    std::ostringstream msg;
    msg << "need n > m: n=" << X_.rows() << ", m=" << X_.cols();
    throw ValidationError(msg.str());
  }
  // Construction fails here if [X0 X1] is rank deficient.
  projFull_ = std::make_shared<ResidualProjector>(X_);
  projReduced_ = std::make_shared<ResidualProjector>(X0_);
}

FitResult fit_family(const Outcomes& outcomes, const Design& design) {
  const Matrix& Y = outcomes.Y;
  if (Y.rows() != design.n())
    throw ValidationError("outcome and design row counts differ");
  if (Y.cols() < 1) throw ValidationError("need at least one location");
  if (!Y.allFinite()) throw ValidationError("outcome matrix has non-finite entries");

  FitResult fit;
  fit.residualsFull = design.fullProjector().apply(Y);
  fit.residualsReduced = design.reducedProjector().apply(Y);
  fit.coefficients = design.x().householderQr().solve(Y);

  const double dfDen = static_cast<double>(design.n() - design.m());
  const Index V = Y.cols();
  fit.sigma2.resize(V);
  fit.degenerate.assign(static_cast<size_t>(V), 0);
  for (Index v = 0; v < V; ++v) {
    const double rss = fit.residualsFull.col(v).squaredNorm();
    fit.sigma2[v] = rss / dfDen;
    if (rss <= kDegenerateTol * Y.col(v).squaredNorm() || rss == 0.0)
      fit.degenerate[static_cast<size_t>(v)] = 1;
  }
  return fit;
}

StatisticVector f_statistics(const FitResult& fit, const Design& design) {
  const Index V = fit.V();
  const double scale =
      static_cast<double>(design.n() - design.m()) / static_cast<double>(design.m1());
  StatisticVector stats;
  stats.dfNum = static_cast<int>(design.m1());
  stats.dfDen = static_cast<int>(design.n() - design.m());
  stats.F.resize(V);
  for (Index v = 0; v < V; ++v) {
    if (fit.degenerate[static_cast<size_t>(v)]) {
      stats.F[v] = 0.0;
      continue;
    }
    const double rssFull = fit.residualsFull.col(v).squaredNorm();
    const double rssReduced = fit.residualsReduced.col(v).squaredNorm();
    // Nesting guarantees rssReduced >= rssFull; rounding can leave a tiny
    // negative difference, clamp it out.
    stats.F[v] = scale * std::max(0.0, rssReduced - rssFull) / rssFull;
  }
  stats.Z = f_to_chisq(stats.F, stats.dfNum, stats.dfDen);
  return stats;
}

Vector f_to_chisq(const Vector& F, int dfNum, int dfDen) {
  if (dfNum < 1 || dfDen < 1) throw ValidationError("degrees of freedom must be >= 1");
  if (!F.allFinite()) throw NumericalError("non-finite F-statistic");
  if ((F.array() < 0).any()) throw ValidationError("negative F-statistic");
  Vector Z(F.size());
  for (Index v = 0; v < F.size(); ++v) {
    double p = dist::f_cdf(F[v], dfNum, dfDen);
    p = std::min(1.0 - kCdfEps, std::max(kCdfEps, p));
    Z[v] = F[v] == 0.0 ? 0.0 : dist::chisq_quantile(p, dfNum);
  }
  return Z;
}

}  // namespace pbj
