#pragma once

#include "pbj/model.hpp"
#include "pbj/types.hpp"

#include <cstdint>
#include <iosfwd>

namespace pbj {

// Rank-r factor M of the estimated statistic correlation: M M^T equals
// the Gram matrix of the standardized full-model residuals. Rows follow
// the ascending order of the observed statistics; columnOrder maps the
// sorted position back to the original location index.
struct ResidualBasis {
  Matrix M;  // V x r
  Index r = 0;
  std::vector<Index> columnOrder;
};

// B x V joint null statistics. Columns are in ascending observed-statistic
// order when isSorted is set; order maps sorted position -> location.
struct NullEnsemble {
  Matrix samples;  // B x V
  std::vector<Index> order;
  bool isSorted = false;
  Index B = 0;
  std::uint64_t seed = 0;
  int dfNum = 0;

  Index V() const { return samples.cols(); }
};

// Ascending permutation of the observed statistics; ties break by index.
std::vector<Index> ascending_order(const Vector& Z);

// Unit-normalize the given residual columns, arranged in the ascending
// statistic order. Throws on a zero column (degenerate locations must be
// filtered before this point).
Matrix standardize_residuals(const Matrix& residualsFull,
                             const std::vector<Index>& order);

// Thin SVD E = U D M~^T, keeping r = min(nRows - 0, cols) informative
// directions; rank is capped by the residual subspace dimension dfDen.
ResidualBasis build_basis(const Matrix& E, Index dfDen,
                          const std::vector<Index>& order);

// Diagonal singular-Wishart sampler: Z_(v)b = || row_v(M S_b) ||^2 with
// S_b an r x m1 standard-normal matrix drawn from stream (seed, b).
NullEnsemble sample_null(const ResidualBasis& basis, int m1, Index B,
                         std::uint64_t seed);

struct PermutationPlan {
  Index B = 0;
  std::uint64_t seed = 0;
  bool identityFirst = false;  // replicate 0 uses the identity permutation
  // Enumerate all n! permutations in lexicographic order instead of
  // sampling; B must equal n! (n <= 12).
  bool exhaustive = false;
};

// Freedman-Lane style permutation null: permute reduced-model residuals,
// refit the full model, transform replicate F-statistics the same way as
// the observed ones. Replicate b uses stream (seed, b).
NullEnsemble permutation_null(const Outcomes& outcomes, const Design& design,
                              const PermutationPlan& plan,
                              const std::vector<Index>& order, int threads = 1);

// Audit dump: 16-byte header (4-char magic, version u32, B u32, V u32,
// little endian) followed by row-major doubles.
void write_ensemble(std::ostream& out, const NullEnsemble& ensemble,
                    const char magic[4]);
void write_ensemble_file(const std::string& path, const NullEnsemble& ensemble,
                         const char magic[4]);

}  // namespace pbj
