#include "pbj/projector.hpp"

#include "helpers.hpp"

#include <doctest.h>

using namespace pbj;

TEST_CASE("all-ones column acts as the centering projector") {
  std::mt19937_64 gen(11);
  const Matrix A = Matrix::Ones(8, 1);
  const ResidualProjector proj(A);
  const Vector y = testutil::random_matrix(8, 1, gen);
  const Vector centered = proj.apply(y);
  const Vector expected = y.array() - y.mean();
  CHECK((centered - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("square basis is rejected") {
  CHECK_THROWS_AS(ResidualProjector(Matrix::Identity(3, 3)), ValidationError);
}

TEST_CASE("rank-deficient basis names dependent columns") {
  Matrix A(6, 3);
  std::mt19937_64 gen(12);
  A.leftCols(2) = testutil::random_matrix(6, 2, gen);
  A.col(2) = 2.0 * A.col(0) - A.col(1);
  try {
    ResidualProjector proj(A);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("dependent columns") != std::string::npos);
  }
}

TEST_CASE("matches the dense normal-equations projector") {
  std::mt19937_64 gen(13);
  const Matrix A = testutil::random_matrix(8, 2, gen);
  const Vector y = testutil::random_matrix(8, 1, gen);
  const ResidualProjector proj(A);
  const Vector expected = testutil::dense_residual_projector(A) * y;
  CHECK((proj.apply(y) - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("projection is idempotent") {
  std::mt19937_64 gen(14);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix A = testutil::random_matrix(12, 3, gen);
    const ResidualProjector proj(A);
    const Vector y = testutil::random_matrix(12, 1, gen);
    const Vector once = proj.apply(y);
    const Vector twice = proj.apply(once);
    CHECK((twice - once).norm() <= 1e-12 * (once.norm() + 1.0));
  }
}

TEST_CASE("nesting: full-model residual norm never exceeds reduced") {
  std::mt19937_64 gen(15);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix X0 = testutil::random_matrix(15, 2, gen);
    Matrix X(15, 4);
    X << X0, testutil::random_matrix(15, 2, gen);
    const ResidualProjector projX(X), projX0(X0);
    const Vector y = testutil::random_matrix(15, 1, gen);
    CHECK(projX.apply(y).norm() <= projX0.apply(y).norm() + 1e-12);
  }
}
