#ifndef PTSEE_CORE_HPP
#define PTSEE_CORE_HPP

#include <Eigen/Dense>

#include <string>

#include "ptsee/errors.hpp"

namespace ptsee {

using Index = Eigen::Index;

/// Row-major dense matrix; rows are observations throughout the library.
template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using DenseMatrix = Matrix<double>;
using DenseVector = Vector<double>;

inline std::string shape_string(Index rows, Index cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

/// Matrix product with a checked inner dimension.
template <class DerivedA, class DerivedB>
Matrix<typename DerivedA::Scalar> matmul(const Eigen::MatrixBase<DerivedA>& a,
                                         const Eigen::MatrixBase<DerivedB>& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: " + shape_string(a.rows(), a.cols()) + " times " +
                     shape_string(b.rows(), b.cols()));
  }
  Matrix<typename DerivedA::Scalar> out = a * b;
  return out;
}

/// Squared Euclidean distances between the rows of `a` with themselves.
/// Symmetric with an exactly zero diagonal.
template <class Derived>
Matrix<typename Derived::Scalar> pairwise_sq_dists(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  const Matrix<Scalar> x = a;
  const Vector<Scalar> norms = x.rowwise().squaredNorm();
  Matrix<Scalar> d = Scalar(-2) * (x * x.transpose());
  d.colwise() += norms;
  d.rowwise() += norms.transpose();
  // The gram product is not guaranteed to be bitwise symmetric.
  Matrix<Scalar> sym = Scalar(0.5) * (d + d.transpose());
  sym = sym.cwiseMax(Scalar(0));
  sym.diagonal().setZero();
  return sym;
}

/// Squared Euclidean distances between every row of `a` and every row of `b`,
/// computed as |a|^2 + |b|^2 - 2 a.b and clamped at zero.
template <class DerivedA, class DerivedB>
Matrix<typename DerivedA::Scalar> pairwise_sq_dists(const Eigen::MatrixBase<DerivedA>& a,
                                                    const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  if (a.cols() != b.cols()) {
    throw ShapeError("pairwise_sq_dists: " + shape_string(a.rows(), a.cols()) + " vs " +
                     shape_string(b.rows(), b.cols()));
  }
  const Matrix<Scalar> x = a;
  const Matrix<Scalar> y = b;
  if (x.rows() == y.rows() && x == y) return pairwise_sq_dists(x);
  const Vector<Scalar> nx = x.rowwise().squaredNorm();
  const Vector<Scalar> ny = y.rowwise().squaredNorm();
  Matrix<Scalar> d = Scalar(-2) * (x * y.transpose());
  d.colwise() += nx;
  d.rowwise() += ny.transpose();
  return d.cwiseMax(Scalar(0));
}

/// Rows of `x` selected by `indices`, in order.
template <class Derived, class IndexRange>
Matrix<typename Derived::Scalar> gather_rows(const Eigen::MatrixBase<Derived>& x,
                                             const IndexRange& indices) {
  Matrix<typename Derived::Scalar> out(static_cast<Index>(std::size(indices)), x.cols());
  Index r = 0;
  for (auto i : indices) out.row(r++) = x.row(static_cast<Index>(i));
  return out;
}

template <class Derived>
bool all_finite(const Eigen::DenseBase<Derived>& x) {
  return x.allFinite();
}

}  // namespace ptsee

#endif  // PTSEE_CORE_HPP
