#pragma once

#include "pbj/types.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace pbj {

enum class CovStructure { Independent, PosAr1, NegAr1 };

// Two-sample synthetic study: groups of n/2 with a mean shift of `effect`
// on the first 10% of locations, tested with m1 = 1.
struct SyntheticConfig {
  Index n = 100;
  Index V = 1000;
  CovStructure covariance = CovStructure::Independent;
  double rho = 0.9;  // magnitude for the AR(1) structures
  double effect = 0.4;
  double effectFraction = 0.1;
  Index nSims = 500;
  Index B = 1000;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  int threads = 1;
  // Subset of {holm-T, holm-Z, pbj-trueSigma, pbj-T, pbj-Z, perm-T}.
  std::vector<std::string> methods;
};

// Signal-injection study on user-supplied region data: subsample rows,
// transform per location, attach a 4-level artificial factor, inject
// signal at nSignalRegions locations, test on 1 or 3 degrees of freedom.
struct InjectionConfig {
  Matrix baseData;
  Index subsampleSize = 100;
  Index nSignalRegions = 3;
  double signalBeta = 10.0;
  int testDf = 1;  // 1 or 3
  bool applyYeoJohnson = true;
  Index nSims = 100;
  Index B = 1000;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  int threads = 1;
  std::vector<std::string> methods;  // subset of {bonferroni, holm, pbj, perm}
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct MethodResult {
  double fwer = 0.0;
  Interval fwerCI;
  double power = 0.0;  // NaN when there are no false nulls
  Interval powerCI;
  double wallClock = 0.0;  // seconds spent inside the method across sims
};

struct StudyResult {
  std::map<std::string, MethodResult> perMethod;
  Index nSims = 0;
};

// Rows are independent draws with cov Sigma_jk = rho^|j-k|, built by the
// AR(1) recursion (rho = 0 gives i.i.d. standard normals).
Matrix ar1_sample(Index n, Index V, double rho, std::uint64_t seed,
                  std::uint64_t stream = 0);

// Wilson score interval for a binomial proportion.
Interval wilson_ci(Index successes, Index trials, double level = 0.95);

StudyResult run_synthetic(const SyntheticConfig& config);
StudyResult run_injection(const InjectionConfig& config);

// Results table, one row per method: CSV or aligned text.
std::string format_study(const StudyResult& result, const std::string& label,
                         bool csv);

}  // namespace pbj
