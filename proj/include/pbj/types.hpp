#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pbj {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Error categories map onto the CLI exit codes: validation (2),
// I/O (3), numerical failure (4).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// n x V outcome matrix, one column per tested location.
struct Outcomes {
  Matrix Y;
  std::vector<std::string> locationIds;

  Index n() const { return Y.rows(); }
  Index V() const { return Y.cols(); }
};

}  // namespace pbj
