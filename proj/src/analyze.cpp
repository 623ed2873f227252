#include "pbj/analyze.hpp"

#include "pbj/null.hpp"
#include "pbj/rng.hpp"
#include "pbj/transform.hpp"

#include <algorithm>
#include <set>

namespace pbj {

namespace {

bool is_joint(const std::string& m) {
  return m == "pbj-ss" || m == "pbj-sd" || m == "perm-ss" || m == "perm-sd";
}

void check_methods(const std::vector<std::string>& methods) {
  static const std::set<std::string> known = {"bonferroni", "holm",   "pbj-ss",
                                              "pbj-sd",     "perm-ss", "perm-sd"};
  if (methods.empty()) throw ValidationError("no methods requested");
  for (const auto& m : methods)
    if (!known.count(m)) throw ValidationError("unknown method name: " + m);
}

}  // namespace

AnalysisResult analyze(const Outcomes& outcomes, const Design& design,
                       const AnalysisConfig& config) {
  check_methods(config.methods);
  if (config.B < 1) throw ValidationError("B must be >= 1");

  Outcomes working = outcomes;
  if (config.applyYeoJohnson) {
    for (Index v = 0; v < working.V(); ++v) {
      const YeoJohnsonFit yj = yeo_johnson_mle(working.Y.col(v));
      working.Y.col(v) = yeo_johnson(working.Y.col(v), yj.lambda);
    }
  }

  const FitResult fit = fit_family(working, design);
  const Index V = fit.V();

  // Inference runs on the non-degenerate subset only.
  std::vector<Index> kept;
  for (Index v = 0; v < V; ++v)
    if (!fit.degenerate[static_cast<size_t>(v)]) kept.push_back(v);
  if (kept.empty()) throw ValidationError("all locations are degenerate");

  FitResult subFit;
  subFit.residualsFull.resize(fit.residualsFull.rows(), static_cast<Index>(kept.size()));
  subFit.residualsReduced.resize(fit.residualsReduced.rows(), static_cast<Index>(kept.size()));
  subFit.sigma2.resize(static_cast<Index>(kept.size()));
  subFit.degenerate.assign(kept.size(), 0);
  Outcomes subOutcomes;
  subOutcomes.Y.resize(working.n(), static_cast<Index>(kept.size()));
  for (size_t j = 0; j < kept.size(); ++j) {
    subFit.residualsFull.col(static_cast<Index>(j)) = fit.residualsFull.col(kept[j]);
    subFit.residualsReduced.col(static_cast<Index>(j)) = fit.residualsReduced.col(kept[j]);
    subFit.sigma2[static_cast<Index>(j)] = fit.sigma2[kept[j]];
    subOutcomes.Y.col(static_cast<Index>(j)) = working.Y.col(kept[j]);
  }

  const StatisticVector stats = f_statistics(subFit, design);
  const Vector pRaw = marginal_p(stats);
  const std::vector<Index> order = ascending_order(stats.Z);

  const bool needPbj = std::any_of(config.methods.begin(), config.methods.end(),
                                   [](const auto& m) { return m.rfind("pbj", 0) == 0; });
  const bool needPerm = std::any_of(config.methods.begin(), config.methods.end(),
                                    [](const auto& m) { return m.rfind("perm", 0) == 0; });

  NullEnsemble pbjNull, permNull;
  if (needPbj) {
    const Matrix E = standardize_residuals(subFit.residualsFull, order);
    const ResidualBasis basis = build_basis(E, design.n() - design.m(), order);
    pbjNull = sample_null(basis, static_cast<int>(design.m1()), config.B,
                          mix64(config.seed) ^ 0x70626au);
    if (config.pbjEnsemblePath)
      write_ensemble_file(*config.pbjEnsemblePath, pbjNull, "PBJN");
  }
  if (needPerm) {
    PermutationPlan plan{config.B, mix64(config.seed) ^ 0x7065726du, false,
                         config.exhaustivePerm};
    permNull = permutation_null(subOutcomes, design, plan, order, config.threads);
    if (config.permEnsemblePath)
      write_ensemble_file(*config.permEnsemblePath, permNull, "PERM");
  }

  AnalysisResult result;
  result.methods = config.methods;
  result.degenerate = fit.degenerate;
  result.stats.dfNum = stats.dfNum;
  result.stats.dfDen = stats.dfDen;
  result.stats.F = Vector::Zero(V);
  result.stats.Z = Vector::Zero(V);
  for (size_t j = 0; j < kept.size(); ++j) {
    result.stats.F[kept[j]] = stats.F[static_cast<Index>(j)];
    result.stats.Z[kept[j]] = stats.Z[static_cast<Index>(j)];
  }

  result.rows.resize(static_cast<size_t>(V));
  for (Index v = 0; v < V; ++v) {
    ReportRow& row = result.rows[static_cast<size_t>(v)];
    row.locationId = v < static_cast<Index>(outcomes.locationIds.size())
                         ? outcomes.locationIds[static_cast<size_t>(v)]
                         : "loc" + std::to_string(v);
    row.F = result.stats.F[v];
    row.Z = result.stats.Z[v];
    row.degenerate = fit.degenerate[static_cast<size_t>(v)] != 0;
    row.pRaw = 1.0;
    row.pAdj.assign(config.methods.size(), 1.0);
  }
  for (size_t j = 0; j < kept.size(); ++j)
    result.rows[static_cast<size_t>(kept[j])].pRaw = pRaw[static_cast<Index>(j)];

  for (size_t mi = 0; mi < config.methods.size(); ++mi) {
    const std::string& method = config.methods[mi];
    AdjustedPValues adj;
    if (method == "bonferroni") {
      adj = bonferroni(pRaw, config.alpha);
    } else if (method == "holm") {
      adj = holm(pRaw, config.alpha);
    } else if (method == "pbj-ss") {
      adj = joint_single_step(stats, pbjNull, config.alpha);
    } else if (method == "pbj-sd") {
      adj = joint_step_down(stats, pbjNull, config.alpha);
    } else if (method == "perm-ss") {
      adj = joint_single_step(stats, permNull, config.alpha);
    } else if (method == "perm-sd") {
      adj = joint_step_down(stats, permNull, config.alpha);
    }
    for (size_t j = 0; j < kept.size(); ++j)
      result.rows[static_cast<size_t>(kept[j])].pAdj[mi] =
          adj.pAdj[static_cast<Index>(j)];
  }
  return result;
}

AnalysisResult analyze_files(const std::string& outcomePath,
                             const std::string& designPath,
                             const std::string& outputPath,
                             const AnalysisConfig& config) {
  const LabeledMatrix outcome = load_matrix(outcomePath);
  const LabeledMatrix designRaw = load_matrix(designPath);
  if (outcome.values.rows() != designRaw.values.rows())
    throw ValidationError("outcome and design row counts differ");
  if (config.testedColumns.empty())
    throw ValidationError("no tested columns given");

  // Resolve tested columns by label, falling back to 0-based index.
  std::vector<Index> tested;
  for (const auto& name : config.testedColumns) {
    auto it = std::find(designRaw.labels.begin(), designRaw.labels.end(), name);
    if (it != designRaw.labels.end()) {
      tested.push_back(static_cast<Index>(it - designRaw.labels.begin()));
      continue;
    }
    try {
      size_t pos = 0;
      const long idx = std::stol(name, &pos);
      if (pos == name.size() && idx >= 0 && idx < designRaw.values.cols()) {
        tested.push_back(static_cast<Index>(idx));
        continue;
      }
    } catch (const std::exception&) {
    }
    throw ValidationError("tested column not found in design: " + name);
  }
  std::sort(tested.begin(), tested.end());
  tested.erase(std::unique(tested.begin(), tested.end()), tested.end());

  Matrix X1(designRaw.values.rows(), static_cast<Index>(tested.size()));
  Matrix X0(designRaw.values.rows(),
            designRaw.values.cols() - static_cast<Index>(tested.size()));
  Index i1 = 0, i0 = 0;
  for (Index c = 0; c < designRaw.values.cols(); ++c) {
    if (std::binary_search(tested.begin(), tested.end(), c))
      X1.col(i1++) = designRaw.values.col(c);
    else
      X0.col(i0++) = designRaw.values.col(c);
  }
  if (X0.cols() == 0)
    throw ValidationError("design must keep at least one nuisance column");

  const Design design(X0, X1);
  Outcomes outcomes{outcome.values, outcome.labels};
  AnalysisResult result = analyze(outcomes, design, config);
  write_report(outputPath, result.methods, result.rows);
  return result;
}

}  // namespace pbj
