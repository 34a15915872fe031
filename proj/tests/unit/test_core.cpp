#include <doctest.h>

#include "ptsee/core.hpp"
#include "support.hpp"

using namespace ptsee;
using testing::max_abs_diff;
using testing::random_matrix;
using testing::to_grid;

TEST_CASE("matmul identity and hand example") {
  Rng rng(1);
  const DenseMatrix m = random_matrix(3, 4, rng);
  CHECK(matmul(DenseMatrix::Identity(3, 3), m) == m);

  DenseMatrix a(2, 2), b(2, 1);
  a << 1, 2, 3, 4;
  b << 1, 1;
  const DenseMatrix c = matmul(a, b);
  CHECK(c(0, 0) == 3.0);
  CHECK(c(1, 0) == 7.0);
}

TEST_CASE("matmul matches triple loop") {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const DenseMatrix a = random_matrix(7, 5, rng), b = random_matrix(5, 3, rng);
    CHECK(max_abs_diff(matmul(a, b), oracle::matmul(to_grid(a), to_grid(b))) <= 1e-12);
  }
}

TEST_CASE("matmul shape mismatch") {
  CHECK_THROWS_AS(matmul(DenseMatrix(2, 3), DenseMatrix(2, 3)), ShapeError);
}

TEST_CASE("matmul associativity") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const DenseMatrix a = random_matrix(4, 6, rng), b = random_matrix(6, 5, rng), c = random_matrix(5, 3, rng);
    const DenseMatrix lhs = matmul(matmul(a, b), c);
    const DenseMatrix rhs = matmul(a, matmul(b, c));
    CHECK((lhs - rhs).norm() <= 1e-9 * std::max(1.0, lhs.norm()));
  }
}

TEST_CASE("pairwise_sq_dists examples") {
  DenseMatrix single(1, 3);
  single << 1, 2, 3;
  CHECK(pairwise_sq_dists(single, single)(0, 0) == 0.0);

  DenseMatrix a(1, 2), b(1, 2);
  a << 0, 0;
  b << 3, 4;
  CHECK(pairwise_sq_dists(a, b)(0, 0) == doctest::Approx(25.0).epsilon(1e-15));
  CHECK_THROWS_AS(pairwise_sq_dists(a, DenseMatrix(2, 3)), ShapeError);
}

TEST_CASE("pairwise_sq_dists matches per-pair loop") {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const DenseMatrix a = random_matrix(10, 4, rng), b = random_matrix(6, 4, rng);
    CHECK(max_abs_diff(pairwise_sq_dists(a, b), oracle::sq_dists(to_grid(a), to_grid(b))) <= 1e-10);
  }
}

TEST_CASE("pairwise_sq_dists self: symmetric, zero diagonal, non-negative") {
  Rng rng(5);
  const DenseMatrix a = random_matrix(25, 6, rng, -100, 100);
  const DenseMatrix d = pairwise_sq_dists(a, a);
  for (Index i = 0; i < d.rows(); ++i) {
    CHECK(d(i, i) == 0.0);
    for (Index j = 0; j < d.cols(); ++j) {
      CHECK(d(i, j) >= 0.0);
      CHECK(std::abs(d(i, j) - d(j, i)) <= 1e-12);
    }
  }
}

TEST_CASE("near-duplicate rows never give negative distances") {
  DenseMatrix a(2, 3);
  a << 1e8, 1e8 + 1e-7, 3, 1e8, 1e8, 3;
  const DenseMatrix d = pairwise_sq_dists(a, DenseMatrix(a.bottomRows(1)));
  CHECK(d.minCoeff() >= 0.0);
}

TEST_CASE("gather_rows and all_finite") {
  DenseMatrix a(3, 2);
  a << 1, 2, 3, 4, 5, 6;
  const DenseMatrix g = gather_rows(a, std::vector<std::size_t>{2, 0});
  CHECK(g(0, 0) == 5.0);
  CHECK(g(1, 1) == 2.0);
  CHECK(all_finite(a));
  a(1, 1) = std::nan("");
  CHECK_FALSE(all_finite(a));
}
