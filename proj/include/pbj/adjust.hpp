#pragma once

#include "pbj/model.hpp"
#include "pbj/null.hpp"

#include <string>

namespace pbj {

struct AdjustedPValues {
  Vector pRaw;
  Vector pAdj;
  std::string method;
  double alpha = 0.05;
  std::vector<char> rejected;
};

// Upper-tail chi-square probability of the transformed statistics;
// identical to the F-scale p-value because the transform is quantile
// matching.
Vector marginal_p(const StatisticVector& stats);

AdjustedPValues bonferroni(const Vector& pRaw, double alpha);
AdjustedPValues holm(const Vector& pRaw, double alpha);

// p~_v = (1/B) sum_b I( max_k Z_(k)b >= Z_v0 ). With addOne set, the
// (1 + count) / (1 + B) variant is used instead.
AdjustedPValues joint_single_step(const StatisticVector& stats,
                                  const NullEnsemble& nulls, double alpha,
                                  bool addOne = false);

// Step-down variant over prefix maxima in ascending observed order,
// with the running-max monotonicity enforcement, mapped back to the
// original location ids.
AdjustedPValues joint_step_down(const StatisticVector& stats,
                                const NullEnsemble& nulls, double alpha,
                                bool addOne = false);

}  // namespace pbj
