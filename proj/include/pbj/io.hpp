#pragma once

#include "pbj/adjust.hpp"
#include "pbj/types.hpp"

#include <string>
#include <vector>

namespace pbj {

enum class MatrixFormat { Csv, Tsv, Binary };

struct LabeledMatrix {
  Matrix values;
  std::vector<std::string> labels;  // column labels
};

// Format is inferred from the extension (.csv / .tsv / .bin) unless given
// explicitly. Text formats require a header row; parse errors name the
// offending row and column.
LabeledMatrix load_matrix(const std::string& path);
LabeledMatrix load_matrix(const std::string& path, MatrixFormat format);

void save_matrix_csv(const std::string& path, const Matrix& values,
                     const std::vector<std::string>& labels);

// Binary layout matches the ensemble dump: 4-char magic "PBJM",
// version u32, rows u32, cols u32, then row-major doubles.
void save_matrix_binary(const std::string& path, const Matrix& values);

struct ReportRow {
  std::string locationId;
  double F = 0.0;
  double Z = 0.0;
  double pRaw = 1.0;
  std::vector<double> pAdj;  // one per requested method
  bool degenerate = false;
};

// Rows sorted by ascending adjusted p-value of the first method.
void write_report(const std::string& path,
                  const std::vector<std::string>& methods,
                  std::vector<ReportRow> rows);

}  // namespace pbj
