#include "pbj/sim.hpp"

#include "pbj/adjust.hpp"
#include "pbj/dist.hpp"
#include "pbj/model.hpp"
#include "pbj/null.hpp"
#include "pbj/rng.hpp"
#include "pbj/transform.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <thread>

namespace pbj {

namespace {

// Separate seed namespaces for data generation, null sampling, and row
// subsampling within one study.
std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t tag,
                       std::uint64_t index) {
  return mix64(mix64(seed) ^ mix64(tag + 1) ^ mix64(index + 1));
}

struct SimOutcome {
  bool anyFalseRejection = false;
  double powerProportion = std::numeric_limits<double>::quiet_NaN();
  double seconds = 0.0;
};

using SimRecord = std::map<std::string, SimOutcome>;

class StopWatch {
 public:
  void start() { t0_ = std::chrono::steady_clock::now(); }
  double stop() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point t0_;
};

SimOutcome score(const AdjustedPValues& adj, const std::vector<char>& isFalseNull,
                 double seconds) {
  SimOutcome out;
  out.seconds = seconds;
  Index falseCount = 0, falseRejected = 0;
  for (size_t v = 0; v < adj.rejected.size(); ++v) {
    if (isFalseNull[v]) {
      ++falseCount;
      if (adj.rejected[v]) ++falseRejected;
    } else if (adj.rejected[v]) {
      out.anyFalseRejection = true;
    }
  }
  if (falseCount > 0)
    out.powerProportion =
        static_cast<double>(falseRejected) / static_cast<double>(falseCount);
  return out;
}

StudyResult aggregate(const std::vector<SimRecord>& records,
                      const std::vector<std::string>& methods) {
  StudyResult result;
  result.nSims = static_cast<Index>(records.size());
  for (const auto& method : methods) {
    MethodResult mr;
    Index events = 0;
    double powerSum = 0.0, powerSq = 0.0;
    Index powerN = 0;
    for (const auto& rec : records) {
      const auto& o = rec.at(method);
      if (o.anyFalseRejection) ++events;
      if (std::isfinite(o.powerProportion)) {
        powerSum += o.powerProportion;
        powerSq += o.powerProportion * o.powerProportion;
        ++powerN;
      }
      mr.wallClock += o.seconds;
    }
    const auto trials = static_cast<Index>(records.size());
    mr.fwer = static_cast<double>(events) / static_cast<double>(trials);
    mr.fwerCI = wilson_ci(events, trials);
    if (powerN > 0) {
      mr.power = powerSum / static_cast<double>(powerN);
      const double var =
          std::max(0.0, powerSq / powerN - mr.power * mr.power);
      const double half = 1.959963984540054 * std::sqrt(var / powerN);
      mr.powerCI = {std::max(0.0, mr.power - half),
                    std::min(1.0, mr.power + half)};
    } else {
      mr.power = std::numeric_limits<double>::quiet_NaN();
    }
    result.perMethod[method] = mr;
  }
  return result;
}

void run_parallel(Index nSims, int threads,
                  const std::function<void(Index)>& body) {
  if (threads <= 1 || nSims < 2) {
    for (Index s = 0; s < nSims; ++s) body(s);
    return;
  }
  std::atomic<Index> next{0};
  auto loop = [&] {
    for (Index s = next.fetch_add(1); s < nSims; s = next.fetch_add(1)) body(s);
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(loop);
  for (auto& t : pool) t.join();
}

// Null ensemble for the known-covariance arm: with one tested degree of
// freedom the diagonal singular Wishart reduces to squared draws from
// N(0, Sigma), which the AR(1) recursion produces in O(V) per replicate.
NullEnsemble true_sigma_null(const SyntheticConfig& cfg,
                             const std::vector<Index>& order,
                             std::uint64_t seed) {
  const double rho = cfg.covariance == CovStructure::Independent ? 0.0
                     : cfg.covariance == CovStructure::PosAr1    ? cfg.rho
                                                                 : -cfg.rho;
  NullEnsemble ens;
  ens.samples.resize(cfg.B, cfg.V);
  ens.order = order;
  ens.isSorted = true;
  ens.B = cfg.B;
  ens.seed = seed;
  ens.dfNum = 1;
  for (Index b = 0; b < cfg.B; ++b) {
    Matrix x = ar1_sample(1, cfg.V, rho, seed, static_cast<std::uint64_t>(b));
    for (Index j = 0; j < cfg.V; ++j) {
      const double z = x(0, order[static_cast<size_t>(j)]);
      ens.samples(b, j) = z * z;
    }
  }
  return ens;
}

}  // namespace

Matrix ar1_sample(Index n, Index V, double rho, std::uint64_t seed,
                  std::uint64_t stream) {
  if (std::abs(rho) >= 1.0) throw ValidationError("|rho| must be < 1");
  auto gen = make_stream(seed, stream);
  std::normal_distribution<double> normal;
  Matrix out(n, V);
  const double innov = std::sqrt(1.0 - rho * rho);
  for (Index i = 0; i < n; ++i) {
    out(i, 0) = normal(gen);
    for (Index j = 1; j < V; ++j)
      out(i, j) = rho * out(i, j - 1) + innov * normal(gen);
  }
  return out;
}

Interval wilson_ci(Index successes, Index trials, double level) {
  if (trials < 1 || successes < 0 || successes > trials)
    throw ValidationError("wilson_ci: invalid counts");
  const double z = dist::normal_quantile(0.5 + level / 2.0);
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2n = z * z / n;
  const double center = (p + z2n / 2.0) / (1.0 + z2n);
  const double half =
      z * std::sqrt(p * (1.0 - p) / n + z2n / (4.0 * n)) / (1.0 + z2n);
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

StudyResult run_synthetic(const SyntheticConfig& cfg) {
  if (cfg.nSims < 1) throw ValidationError("nSims must be >= 1");
  if (cfg.n < 4 || cfg.n % 2 != 0)
    throw ValidationError("n must be even and >= 4");
  if (cfg.effectFraction <= 0.0 || cfg.effectFraction >= 1.0)
    throw ValidationError("effect fraction must lie in (0,1)");
  std::vector<std::string> methods = cfg.methods;
  if (methods.empty()) methods = {"holm-T", "holm-Z", "pbj-T", "pbj-Z"};

  const double rho = cfg.covariance == CovStructure::Independent ? 0.0
                     : cfg.covariance == CovStructure::PosAr1    ? cfg.rho
                                                                 : -cfg.rho;
  const Index nFalse =
      cfg.effect == 0.0
          ? 0
          : static_cast<Index>(std::llround(cfg.effectFraction * cfg.V));
  std::vector<char> isFalseNull(static_cast<size_t>(cfg.V), 0);
  for (Index v = 0; v < nFalse; ++v) isFalseNull[static_cast<size_t>(v)] = 1;

  Matrix X0 = Matrix::Ones(cfg.n, 1);
  Matrix X1 = Matrix::Zero(cfg.n, 1);
  X1.bottomRows(cfg.n / 2).setOnes();
  const Design design(X0, X1);
  const int dfDen = static_cast<int>(cfg.n - 2);

  const bool wantSigmaHat =
      std::any_of(methods.begin(), methods.end(), [](const std::string& m) {
        return m == "pbj-T" || m == "pbj-Z";
      });

  std::vector<SimRecord> records(static_cast<size_t>(cfg.nSims));
  auto body = [&](Index s) {
    Matrix Y = ar1_sample(cfg.n, cfg.V, rho, sub_seed(cfg.seed, 1, 0),
                          static_cast<std::uint64_t>(s));
    if (cfg.effect != 0.0)
      Y.bottomRightCorner(cfg.n / 2, cfg.V)
          .leftCols(nFalse)
          .array() += cfg.effect;

    const FitResult fit = fit_family(Outcomes{Y, {}}, design);
    const StatisticVector stats = f_statistics(fit, design);
    const std::vector<Index> order = ascending_order(stats.Z);

    // Statistic vectors on the two scales; F ordering equals Z ordering.
    StatisticVector rawStats = stats;
    rawStats.Z = stats.F;  // untransformed T^2 statistics

    SimRecord& rec = records[static_cast<size_t>(s)];
    StopWatch watch;

    NullEnsemble sigmaHatNull;
    double sigmaHatSeconds = 0.0;
    if (wantSigmaHat) {
      watch.start();
      const Matrix E = standardize_residuals(fit.residualsFull, order);
      const ResidualBasis basis = build_basis(E, dfDen, order);
      sigmaHatNull = sample_null(basis, 1, cfg.B,
                                 sub_seed(cfg.seed, 2, static_cast<std::uint64_t>(s)));
      sigmaHatSeconds = watch.stop();
    }

    for (const auto& method : methods) {
      watch.start();
      AdjustedPValues adj;
      if (method == "holm-T") {
        // Standard-normal marginal p-values for the T-statistics.
        Vector p(cfg.V);
        for (Index v = 0; v < cfg.V; ++v)
          p[v] = 2.0 * (1.0 - dist::normal_cdf(std::sqrt(stats.F[v])));
        adj = holm(p, cfg.alpha);
      } else if (method == "holm-Z") {
        adj = holm(marginal_p(stats), cfg.alpha);
      } else if (method == "pbj-T") {
        adj = joint_step_down(rawStats, sigmaHatNull, cfg.alpha);
      } else if (method == "pbj-Z") {
        adj = joint_step_down(stats, sigmaHatNull, cfg.alpha);
      } else if (method == "pbj-trueSigma") {
        const NullEnsemble nulls = true_sigma_null(
            cfg, order, sub_seed(cfg.seed, 3, static_cast<std::uint64_t>(s)));
        adj = joint_step_down(rawStats, nulls, cfg.alpha);
      } else if (method == "perm-T") {
        PermutationPlan plan{cfg.B,
                             sub_seed(cfg.seed, 4, static_cast<std::uint64_t>(s)),
                             false};
        const NullEnsemble nulls =
            permutation_null(Outcomes{Y, {}}, design, plan, order);
        adj = joint_step_down(stats, nulls, cfg.alpha);
      } else {
        throw ValidationError("unknown synthetic method: " + method);
      }
      double seconds = watch.stop();
      if (method == "pbj-T" || method == "pbj-Z") seconds += sigmaHatSeconds;
      rec[method] = score(adj, isFalseNull, seconds);
    }
  };
  run_parallel(cfg.nSims, cfg.threads, body);
  return aggregate(records, methods);
}

StudyResult run_injection(const InjectionConfig& cfg) {
  const Index N = cfg.baseData.rows();
  const Index V = cfg.baseData.cols();
  if (cfg.nSims < 1) throw ValidationError("nSims must be >= 1");
  if (cfg.subsampleSize > N)
    throw ValidationError("subsample size exceeds available rows");
  if (cfg.testDf != 1 && cfg.testDf != 3)
    throw ValidationError("testDf must be 1 or 3");
  if (cfg.nSignalRegions > V)
    throw ValidationError("more signal regions than locations");
  std::vector<std::string> methods = cfg.methods;
  if (methods.empty()) methods = {"bonferroni", "holm", "pbj", "perm"};

  const Index n = cfg.subsampleSize;

  // Artificial 4-level factor in equal proportions; g1..g3 indicators.
  Matrix g = Matrix::Zero(n, 3);
  for (Index i = 0; i < n; ++i) {
    const Index level = i % 4;
    if (level >= 1) g(i, level - 1) = 1.0;
  }
  Matrix intercept = Matrix::Ones(n, 1);
  Design design = [&] {
    if (cfg.testDf == 3) return Design(intercept, g);
    Matrix X0(n, 3);
    X0 << intercept, g.col(1), g.col(2);
    return Design(X0, g.col(0));
  }();

  std::vector<SimRecord> records(static_cast<size_t>(cfg.nSims));
  auto body = [&](Index s) {
    auto gen = make_stream(sub_seed(cfg.seed, 5, 0), static_cast<std::uint64_t>(s));

    // Subsample rows without replacement.
    std::vector<Index> rows(static_cast<size_t>(N));
    std::iota(rows.begin(), rows.end(), Index{0});
    for (Index i = 0; i < n; ++i) {
      std::uniform_int_distribution<Index> pick(i, N - 1);
      std::swap(rows[static_cast<size_t>(i)], rows[static_cast<size_t>(pick(gen))]);
    }
    Matrix Y(n, V);
    for (Index i = 0; i < n; ++i) Y.row(i) = cfg.baseData.row(rows[static_cast<size_t>(i)]);

    if (cfg.applyYeoJohnson) {
      for (Index v = 0; v < V; ++v) {
        const YeoJohnsonFit yj = yeo_johnson_mle(Y.col(v));
        Y.col(v) = yeo_johnson(Y.col(v), yj.lambda);
      }
    }

    // Signal locations, drawn without replacement.
    std::vector<char> isFalseNull(static_cast<size_t>(V), 0);
    if (cfg.signalBeta != 0.0) {
      std::vector<Index> locs(static_cast<size_t>(V));
      std::iota(locs.begin(), locs.end(), Index{0});
      for (Index k = 0; k < cfg.nSignalRegions; ++k) {
        std::uniform_int_distribution<Index> pick(k, V - 1);
        std::swap(locs[static_cast<size_t>(k)], locs[static_cast<size_t>(pick(gen))]);
        const Index v = locs[static_cast<size_t>(k)];
        isFalseNull[static_cast<size_t>(v)] = 1;
        Y.col(v) += cfg.signalBeta * g.col(0);
      }
    }

    const FitResult fit = fit_family(Outcomes{Y, {}}, design);
    const StatisticVector stats = f_statistics(fit, design);
    const std::vector<Index> order = ascending_order(stats.Z);
    const Vector pRaw = marginal_p(stats);

    SimRecord& rec = records[static_cast<size_t>(s)];
    StopWatch watch;
    for (const auto& method : methods) {
      watch.start();
      AdjustedPValues adj;
      if (method == "bonferroni") {
        adj = bonferroni(pRaw, cfg.alpha);
      } else if (method == "holm") {
        adj = holm(pRaw, cfg.alpha);
      } else if (method == "pbj") {
        const Matrix E = standardize_residuals(fit.residualsFull, order);
        const ResidualBasis basis =
            build_basis(E, design.n() - design.m(), order);
        const NullEnsemble nulls =
            sample_null(basis, static_cast<int>(design.m1()), cfg.B,
                        sub_seed(cfg.seed, 6, static_cast<std::uint64_t>(s)));
        adj = joint_step_down(stats, nulls, cfg.alpha);
      } else if (method == "perm") {
        PermutationPlan plan{cfg.B,
                             sub_seed(cfg.seed, 7, static_cast<std::uint64_t>(s)),
                             false};
        const NullEnsemble nulls =
            permutation_null(Outcomes{Y, {}}, design, plan, order);
        adj = joint_single_step(stats, nulls, cfg.alpha);
      } else {
        throw ValidationError("unknown injection method: " + method);
      }
      rec[method] = score(adj, isFalseNull, watch.stop());
    }
  };
  run_parallel(cfg.nSims, cfg.threads, body);
  return aggregate(records, methods);
}

std::string format_study(const StudyResult& result, const std::string& label,
                         bool csv) {
  std::ostringstream out;
  out << std::setprecision(4) << std::fixed;
  if (csv) {
    out << "method,fwer,fwerLo,fwerHi,power,powerLo,powerHi,seconds\n";
    for (const auto& [method, mr] : result.perMethod)
      out << method << ',' << mr.fwer << ',' << mr.fwerCI.lo << ','
          << mr.fwerCI.hi << ',' << mr.power << ',' << mr.powerCI.lo << ','
          << mr.powerCI.hi << ',' << mr.wallClock << '\n';
  } else {
    out << "# " << label << " (" << result.nSims << " simulations)\n";
    out << std::left << std::setw(16) << "method" << std::right
        << std::setw(8) << "fwer" << std::setw(8) << "lo" << std::setw(8)
        << "hi" << std::setw(8) << "power" << std::setw(8) << "lo"
        << std::setw(8) << "hi" << std::setw(10) << "seconds" << '\n';
    for (const auto& [method, mr] : result.perMethod)
      out << std::left << std::setw(16) << method << std::right
          << std::setw(8) << mr.fwer << std::setw(8) << mr.fwerCI.lo
          << std::setw(8) << mr.fwerCI.hi << std::setw(8) << mr.power
          << std::setw(8) << mr.powerCI.lo << std::setw(8) << mr.powerCI.hi
          << std::setw(10) << mr.wallClock << '\n';
  }
  return out.str();
}

}  // namespace pbj
