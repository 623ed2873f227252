#pragma once

#include "pbj/adjust.hpp"
#include "pbj/io.hpp"
#include "pbj/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pbj {

struct AnalysisConfig {
  // Tested columns of the design, by header label or 0-based index.
  std::vector<std::string> testedColumns;
  // Any of: bonferroni, holm, pbj-ss, pbj-sd, perm-ss, perm-sd.
  std::vector<std::string> methods;
  Index B = 5000;
  std::uint64_t seed = 0;
  double alpha = 0.05;
  bool applyYeoJohnson = false;
  // Enumerate all n! permutations (perm methods only; B must equal n!).
  bool exhaustivePerm = false;
  int threads = 1;
  // Optional audit dumps of the generated ensembles.
  std::optional<std::string> pbjEnsemblePath;
  std::optional<std::string> permEnsemblePath;
};

struct AnalysisResult {
  std::vector<ReportRow> rows;           // one per location, original order
  std::vector<std::string> methods;      // column order of ReportRow::pAdj
  StatisticVector stats;                 // degenerate locations hold F = Z = 0
  std::vector<char> degenerate;
};

// End-to-end run over in-memory matrices: fit, transform, build whatever
// ensembles the method list needs, adjust. Degenerate locations are
// excluded from inference and reported with p = 1.
AnalysisResult analyze(const Outcomes& outcomes, const Design& design,
                       const AnalysisConfig& config);

// File-based wrapper used by the CLI: loads matrices, splits the design
// into X0/X1 by testedColumns, writes the report CSV.
AnalysisResult analyze_files(const std::string& outcomePath,
                             const std::string& designPath,
                             const std::string& outputPath,
                             const AnalysisConfig& config);

}  // namespace pbj
