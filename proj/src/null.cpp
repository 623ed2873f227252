#include "pbj/null.hpp"

#include "pbj/rng.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <numeric>
#include <ostream>
#include <thread>

namespace pbj {

std::vector<Index> ascending_order(const Vector& Z) {
  std::vector<Index> order(static_cast<size_t>(Z.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return Z[a] < Z[b]; });
  return order;
}

Matrix standardize_residuals(const Matrix& residualsFull,
                             const std::vector<Index>& order) {
  if (order.size() != static_cast<size_t>(residualsFull.cols()))
    throw ValidationError("order length does not match column count");
  Matrix E(residualsFull.rows(), residualsFull.cols());
  for (size_t j = 0; j < order.size(); ++j) {
    const double norm = residualsFull.col(order[j]).norm();
    if (norm == 0.0)
      throw ValidationError("zero residual column reached standardization");
    E.col(static_cast<Index>(j)) = residualsFull.col(order[j]) / norm;
  }
  return E;
}

ResidualBasis build_basis(const Matrix& E, Index dfDen,
                          const std::vector<Index>& order) {
  const Index r = std::min(dfDen, E.cols());
  Eigen::BDCSVD<Matrix> svd(E, Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericalError("SVD failed");
  ResidualBasis basis;
  basis.r = r;
  basis.M = svd.matrixV().leftCols(r) *
            svd.singularValues().head(r).asDiagonal();
  basis.columnOrder = order;
  return basis;
}

NullEnsemble sample_null(const ResidualBasis& basis, int m1, Index B,
                         std::uint64_t seed) {
  if (B < 1) throw ValidationError("B must be >= 1");
  if (m1 < 1) throw ValidationError("m1 must be >= 1");
  const Index V = basis.M.rows();
  const Index r = basis.r;

  NullEnsemble ens;
  ens.samples.resize(B, V);
  ens.order = basis.columnOrder;
  ens.isSorted = !basis.columnOrder.empty();
  ens.B = B;
  ens.seed = seed;
  ens.dfNum = m1;

  // Replicates are chunked so the V x (chunk * m1) product stays modest;
  // each replicate's normals come from its own (seed, b) stream, so the
  // chunking is invisible in the output.
  const Index chunk = std::max<Index>(
      1, std::min<Index>(B, (1 << 22) / std::max<Index>(1, V * m1) + 1));
  Matrix S(r, chunk * m1);
  for (Index b0 = 0; b0 < B; b0 += chunk) {
    const Index nb = std::min(chunk, B - b0);
    for (Index b = 0; b < nb; ++b) {
      auto gen = make_stream(seed, static_cast<std::uint64_t>(b0 + b));
      std::normal_distribution<double> normal;
      for (Index j = 0; j < m1; ++j)
        for (Index i = 0; i < r; ++i) S(i, b * m1 + j) = normal(gen);
    }
    Matrix T = basis.M * S.leftCols(nb * m1);  // V x (nb*m1)
    for (Index b = 0; b < nb; ++b)
      ens.samples.row(b0 + b) =
          T.middleCols(b * m1, m1).rowwise().squaredNorm().transpose();
  }
  return ens;
}

NullEnsemble permutation_null(const Outcomes& outcomes, const Design& design,
                              const PermutationPlan& plan,
                              const std::vector<Index>& order, int threads) {
  if (plan.B < 1) throw ValidationError("B must be >= 1");
  const Index n = design.n();
  const Index V = outcomes.V();
  if (order.size() != static_cast<size_t>(V))
    throw ValidationError("order length does not match V");

  // Reduced-model residuals, columns already in ascending statistic order.
  Matrix residReduced(n, V);
  {
    Matrix all = design.reducedProjector().apply(outcomes.Y);
    for (size_t j = 0; j < order.size(); ++j)
      residReduced.col(static_cast<Index>(j)) = all.col(order[j]);
  }

  NullEnsemble ens;
  ens.samples.resize(plan.B, V);
  ens.order = order;
  ens.isSorted = true;
  ens.B = plan.B;
  ens.seed = plan.seed;
  ens.dfNum = static_cast<int>(design.m1());

  const double scale =
      static_cast<double>(design.n() - design.m()) / static_cast<double>(design.m1());
  const int dfNum = static_cast<int>(design.m1());
  const int dfDen = static_cast<int>(design.n() - design.m());

  if (plan.exhaustive) {
    if (n > 12) throw ValidationError("exhaustive permutations need n <= 12");
    Index fact = 1;
    for (Index i = 2; i <= n; ++i) fact *= i;
    if (plan.B != fact)
      throw ValidationError("exhaustive permutations need B = n!");
  }

  auto worker = [&](Index bBegin, Index bEnd) {
    std::vector<Index> perm(static_cast<size_t>(n));
    Matrix Yb(n, V);
    for (Index b = bBegin; b < bEnd; ++b) {
      std::iota(perm.begin(), perm.end(), Index{0});
      if (plan.exhaustive) {
        // Unrank b in the factorial number system (lexicographic order).
        std::vector<Index> pool = perm;
        Index code = b;
        Index fact = 1;
        for (Index i = 2; i < n; ++i) fact *= i;
        for (Index i = 0; i < n; ++i) {
          const Index pos = fact > 0 ? code / fact : 0;
          perm[static_cast<size_t>(i)] = pool[static_cast<size_t>(pos)];
          pool.erase(pool.begin() + pos);
          if (fact > 0) {
            code %= fact;
            if (n - 1 - i > 0) fact /= (n - 1 - i);
          }
        }
      } else if (!(plan.identityFirst && b == 0)) {
        auto gen = make_stream(plan.seed, static_cast<std::uint64_t>(b));
        for (Index i = n - 1; i > 0; --i) {
          std::uniform_int_distribution<Index> pick(0, i);
          std::swap(perm[static_cast<size_t>(i)],
                    perm[static_cast<size_t>(pick(gen))]);
        }
      }
      for (Index i = 0; i < n; ++i)
        Yb.row(i) = residReduced.row(perm[static_cast<size_t>(i)]);
      const Matrix rFull = design.fullProjector().apply(Yb);
      const Matrix rRed = design.reducedProjector().apply(Yb);
      Vector F(V);
      for (Index v = 0; v < V; ++v) {
        const double rssFull = rFull.col(v).squaredNorm();
        const double rssRed = rRed.col(v).squaredNorm();
        F[v] = rssFull > 0.0
                   ? scale * std::max(0.0, rssRed - rssFull) / rssFull
                   : 0.0;
      }
      ens.samples.row(b) = f_to_chisq(F, dfNum, dfDen).transpose();
    }
  };

  if (threads <= 1 || plan.B < 2 * threads) {
    worker(0, plan.B);
  } else {
    std::vector<std::thread> pool;
    const Index step = (plan.B + threads - 1) / threads;
    for (Index b0 = 0; b0 < plan.B; b0 += step)
      pool.emplace_back(worker, b0, std::min(plan.B, b0 + step));
    for (auto& t : pool) t.join();
  }
  return ens;
}

void write_ensemble(std::ostream& out, const NullEnsemble& ensemble,
                    const char magic[4]) {
  const auto version = static_cast<std::uint32_t>(1);
  const auto B = static_cast<std::uint32_t>(ensemble.B);
  const auto V = static_cast<std::uint32_t>(ensemble.V());
  out.write(magic, 4);
  out.write(reinterpret_cast<const char*>(&version), 4);
  out.write(reinterpret_cast<const char*>(&B), 4);
  out.write(reinterpret_cast<const char*>(&V), 4);
  std::vector<double> row(static_cast<size_t>(ensemble.V()));
  for (Index b = 0; b < ensemble.B; ++b) {
    for (Index v = 0; v < ensemble.V(); ++v)
      row[static_cast<size_t>(v)] = ensemble.samples(b, v);
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(double)));
  }
  if (!out) throw IoError("ensemble write failed");
}

void write_ensemble_file(const std::string& path, const NullEnsemble& ensemble,
                         const char magic[4]) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_ensemble(out, ensemble, magic);
}

}  // namespace pbj
