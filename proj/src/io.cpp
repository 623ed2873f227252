#include "pbj/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace pbj {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

LabeledMatrix load_text(const std::string& path, char sep) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  LabeledMatrix lm;
  lm.labels = split(line, sep);
  const size_t cols = lm.labels.size();
  if (cols == 0) throw IoError(path + ": empty header row");

  std::vector<double> data;
  size_t rows = 0;
  for (size_t lineNo = 2; std::getline(in, line); ++lineNo) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line, sep);
    if (cells.size() != cols) {
      std::ostringstream msg;
      msg << path << ": row " << lineNo << " has " << cells.size()
          << " cells, expected " << cols;
      throw IoError(msg.str());
    }
    for (size_t c = 0; c < cols; ++c) {
      double value;
      const auto& cell = cells[c];
      const auto res =
          std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
        std::ostringstream msg;
        msg << path << ": non-numeric cell at row " << lineNo << ", column "
            << (c + 1) << ": '" << cell << "'";
        throw IoError(msg.str());
      }
      data.push_back(value);
    }
    ++rows;
  }
  if (rows == 0) throw IoError(path + ": no data rows");
  lm.values.resize(static_cast<Index>(rows), static_cast<Index>(cols));
  for (size_t r = 0; r < rows; ++r)
    for (size_t c = 0; c < cols; ++c)
      lm.values(static_cast<Index>(r), static_cast<Index>(c)) =
          data[r * cols + c];
  return lm;
}

LabeledMatrix load_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  char magic[4];
  std::uint32_t version = 0, rows = 0, cols = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&version), 4);
  in.read(reinterpret_cast<char*>(&rows), 4);
  in.read(reinterpret_cast<char*>(&cols), 4);
  if (!in) throw IoError(path + ": truncated header");
  if (rows == 0 || cols == 0) throw IoError(path + ": empty matrix");
  LabeledMatrix lm;
  lm.values.resize(rows, cols);
  std::vector<double> row(cols);
  for (std::uint32_t r = 0; r < rows; ++r) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(cols * sizeof(double)));
    if (!in) throw IoError(path + ": truncated data");
    for (std::uint32_t c = 0; c < cols; ++c) lm.values(r, c) = row[c];
  }
  lm.labels.resize(cols);
  for (std::uint32_t c = 0; c < cols; ++c) lm.labels[c] = "c" + std::to_string(c);
  return lm;
}

}  // namespace

LabeledMatrix load_matrix(const std::string& path) {
  auto ends_with = [&](const char* suffix) {
    const size_t len = std::strlen(suffix);
    return path.size() >= len && path.compare(path.size() - len, len, suffix) == 0;
  };
  if (ends_with(".tsv")) return load_matrix(path, MatrixFormat::Tsv);
  if (ends_with(".bin")) return load_matrix(path, MatrixFormat::Binary);
  return load_matrix(path, MatrixFormat::Csv);
}

LabeledMatrix load_matrix(const std::string& path, MatrixFormat format) {
  switch (format) {
    case MatrixFormat::Csv:
      return load_text(path, ',');
    case MatrixFormat::Tsv:
      return load_text(path, '\t');
    case MatrixFormat::Binary:
      return load_binary(path);
  }
  throw IoError("unknown matrix format");
}

void save_matrix_csv(const std::string& path, const Matrix& values,
                     const std::vector<std::string>& labels) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  for (Index c = 0; c < values.cols(); ++c) {
    if (c) out << ',';
    out << (c < static_cast<Index>(labels.size())
                ? labels[static_cast<size_t>(c)]
                : "c" + std::to_string(c));
  }
  out << '\n';
  out << std::setprecision(17);
  for (Index r = 0; r < values.rows(); ++r) {
    for (Index c = 0; c < values.cols(); ++c) {
      if (c) out << ',';
      out << values(r, c);
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

void save_matrix_binary(const std::string& path, const Matrix& values) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  const char magic[4] = {'P', 'B', 'J', 'M'};
  const std::uint32_t version = 1;
  const auto rows = static_cast<std::uint32_t>(values.rows());
  const auto cols = static_cast<std::uint32_t>(values.cols());
  out.write(magic, 4);
  out.write(reinterpret_cast<const char*>(&version), 4);
  out.write(reinterpret_cast<const char*>(&rows), 4);
  out.write(reinterpret_cast<const char*>(&cols), 4);
  std::vector<double> row(cols);
  for (std::uint32_t r = 0; r < rows; ++r) {
    for (std::uint32_t c = 0; c < cols; ++c) row[c] = values(r, c);
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(cols * sizeof(double)));
  }
  if (!out) throw IoError("write failed: " + path);
}

void write_report(const std::string& path,
                  const std::vector<std::string>& methods,
                  std::vector<ReportRow> rows) {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ReportRow& a, const ReportRow& b) {
                     const double pa = a.pAdj.empty() ? 1.0 : a.pAdj.front();
                     const double pb = b.pAdj.empty() ? 1.0 : b.pAdj.front();
                     return pa < pb;
                   });
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "locationId,F,Z,pRaw";
  for (const auto& m : methods) out << ",pAdj_" << m;
  out << ",degenerate\n";
  out << std::setprecision(6);
  for (const auto& row : rows) {
    out << row.locationId << ',' << row.F << ',' << row.Z << ',' << row.pRaw;
    for (const double p : row.pAdj) out << ',' << p;
    out << ',' << (row.degenerate ? 1 : 0) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace pbj
