#include "pbj/adjust.hpp"

#include "pbj/dist.hpp"

#include <algorithm>
#include <numeric>

namespace pbj {

namespace {

void finalize(AdjustedPValues& out, double alpha) {
  out.alpha = alpha;
  out.rejected.assign(static_cast<size_t>(out.pAdj.size()), 0);
  for (Index v = 0; v < out.pAdj.size(); ++v)
    if (out.pAdj[v] < alpha) out.rejected[static_cast<size_t>(v)] = 1;
}

double estimate(Index count, Index B, bool addOne) {
  if (addOne)
    return static_cast<double>(count + 1) / static_cast<double>(B + 1);
  return static_cast<double>(count) / static_cast<double>(B);
}

}  // namespace

Vector marginal_p(const StatisticVector& stats) {
  Vector p(stats.Z.size());
  for (Index v = 0; v < stats.Z.size(); ++v)
    p[v] = dist::chisq_sf(stats.Z[v], stats.dfNum);
  return p;
}

AdjustedPValues bonferroni(const Vector& pRaw, double alpha) {
  const auto V = static_cast<double>(pRaw.size());
  AdjustedPValues out;
  out.method = "bonferroni";
  out.pRaw = pRaw;
  out.pAdj = (pRaw.array() * V).min(1.0);
  finalize(out, alpha);
  return out;
}

AdjustedPValues holm(const Vector& pRaw, double alpha) {
  const Index V = pRaw.size();
  std::vector<Index> order(static_cast<size_t>(V));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return pRaw[a] < pRaw[b]; });

  AdjustedPValues out;
  out.method = "holm";
  out.pRaw = pRaw;
  out.pAdj.resize(V);
  double running = 0.0;
  for (Index k = 0; k < V; ++k) {
    const Index v = order[static_cast<size_t>(k)];
    running = std::max(running,
                       static_cast<double>(V - k) * pRaw[v]);
    out.pAdj[v] = std::min(1.0, running);
  }
  finalize(out, alpha);
  return out;
}

AdjustedPValues joint_single_step(const StatisticVector& stats,
                                  const NullEnsemble& nulls, double alpha,
                                  bool addOne) {
  if (nulls.B < 1) throw ValidationError("empty null ensemble");
  const Index V = stats.Z.size();
  Vector maxima = nulls.samples.rowwise().maxCoeff();
  std::sort(maxima.begin(), maxima.end());

  AdjustedPValues out;
  out.method = "joint-single-step";
  out.pRaw = marginal_p(stats);
  out.pAdj.resize(V);
  for (Index v = 0; v < V; ++v) {
    const Index count =
        maxima.size() -
        (std::lower_bound(maxima.begin(), maxima.end(), stats.Z[v]) -
         maxima.begin());
    out.pAdj[v] = std::min(1.0, estimate(count, nulls.B, addOne));
  }
  finalize(out, alpha);
  return out;
}

AdjustedPValues joint_step_down(const StatisticVector& stats,
                                const NullEnsemble& nulls, double alpha,
                                bool addOne) {
  if (nulls.B < 1) throw ValidationError("empty null ensemble");
  if (!nulls.isSorted)
    throw ValidationError("step-down needs an ascending-sorted ensemble");
  const Index V = stats.Z.size();
  if (static_cast<Index>(nulls.order.size()) != V ||
      nulls.samples.cols() != V)
    throw ValidationError("ensemble and statistic sizes differ");

  AdjustedPValues out;
  out.method = "joint-step-down";
  out.pRaw = marginal_p(stats);
  out.pAdj.resize(V);

  // One pass over the sorted columns keeps per-replicate prefix maxima
  // for the intermediate values p*_(v).
  std::vector<double> pStar(static_cast<size_t>(V));
  Vector prefixMax = Vector::Constant(nulls.B, -1.0);
  for (Index v = 0; v < V; ++v) {
    const Index loc = nulls.order[static_cast<size_t>(v)];
    Index count = 0;
    for (Index b = 0; b < nulls.B; ++b) {
      prefixMax[b] = std::max(prefixMax[b], nulls.samples(b, v));
      if (prefixMax[b] >= stats.Z[loc]) ++count;
    }
    pStar[static_cast<size_t>(v)] = estimate(count, nulls.B, addOne);
  }
  // Running max from the most significant statistic downward keeps the
  // adjusted values monotone along the step-down path.
  double running = 0.0;
  for (Index v = V - 1; v >= 0; --v) {
    running = std::max(running, pStar[static_cast<size_t>(v)]);
    out.pAdj[nulls.order[static_cast<size_t>(v)]] = std::min(1.0, running);
  }
  finalize(out, alpha);
  return out;
}

}  // namespace pbj
