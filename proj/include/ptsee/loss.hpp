#ifndef PTSEE_LOSS_HPP
#define PTSEE_LOSS_HPP

#include <cmath>
#include <vector>

#include "ptsee/affinity.hpp"
#include "ptsee/core.hpp"
#include "ptsee/rng.hpp"

namespace ptsee {

/// Student-t neighbor probabilities in the embedding space.
template <class Scalar>
struct LowDimAffinities {
  Matrix<Scalar> Q;
  /// (1 + d)^-1 before normalization; zero on the pairwise diagonal.
  Matrix<Scalar> kernel;
  Scalar normalizer = 0;
  AffinityKind kind = AffinityKind::pairwise_joint;
  Matrix<Scalar> y_data;
  Matrix<Scalar> y_exemplars;  // empty for the pairwise kind
};

template <class Scalar>
struct LossReport {
  Scalar value = 0;
  Matrix<Scalar> grad_data;
  Matrix<Scalar> grad_exemplars;
  /// Global denominator of the low-dimensional distribution (sampled for NCE).
  Scalar normalizer = 0;
};

inline constexpr double kProbabilityFloor = 1e-300;

namespace detail {

template <class Scalar>
Scalar kl_term(Scalar p, Scalar q) {
  if (p <= Scalar(0)) return Scalar(0);
  if (q <= Scalar(0)) throw DivergenceInfiniteError("q is zero where p is positive");
  return p * std::log(p / std::max(q, static_cast<Scalar>(kProbabilityFloor)));
}

template <class Scalar, class A, class B>
Scalar sq_dist(const A& a, const B& b) {
  Scalar s = 0;
  for (Index c = 0; c < a.size(); ++c) {
    const Scalar t = a(c) - b(c);
    s += t * t;
  }
  return s;
}

// grad_a.row(i) += g (a_i - b_j); grad_b.row(j) -= g (a_i - b_j)
template <class Scalar>
void accumulate_pair(Matrix<Scalar>& grad_a, Matrix<Scalar>& grad_b, const Matrix<Scalar>& a,
                     const Matrix<Scalar>& b, Index i, Index j, Scalar g) {
  for (Index c = 0; c < a.cols(); ++c) {
    const Scalar t = g * (a(i, c) - b(j, c));
    grad_a(i, c) += t;
    grad_b(j, c) -= t;
  }
}

}  // namespace detail

/// q_ij = (1 + |y_i - y_j|^2)^-1 / sum_{k != l} (1 + |y_k - y_l|^2)^-1, q_ii = 0.
template <class Derived>
LowDimAffinities<typename Derived::Scalar> pairwise_q(const Eigen::MatrixBase<Derived>& y) {
  using Scalar = typename Derived::Scalar;
  const Index n = y.rows();
  if (n < 2) throw ParameterError("pairwise_q needs at least 2 points");
  LowDimAffinities<Scalar> out;
  out.kind = AffinityKind::pairwise_joint;
  out.y_data = y;
  out.kernel = Matrix<Scalar>::Zero(n, n);
  Scalar total = 0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const Scalar k = Scalar(1) / (Scalar(1) + detail::sq_dist<Scalar>(out.y_data.row(i), out.y_data.row(j)));
      out.kernel(i, j) = k;
      out.kernel(j, i) = k;
      total += Scalar(2) * k;
    }
  }
  out.normalizer = total;
  out.Q = out.kernel / total;
  return out;
}

/// q_j|i = (1 + d_ij)^-1 / sum_i sum_k (1 + d_ik)^-1 over the data rows
/// present and every exemplar.
template <class DerivedY, class DerivedE>
LowDimAffinities<typename DerivedY::Scalar> exemplar_q(const Eigen::MatrixBase<DerivedY>& y_data,
                                                       const Eigen::MatrixBase<DerivedE>& y_exemplars) {
  using Scalar = typename DerivedY::Scalar;
  if (y_data.cols() != y_exemplars.cols()) throw ShapeError("exemplar_q: embedding dimensions differ");
  const Index n = y_data.rows();
  const Index z = y_exemplars.rows();
  if (n < 1 || z < 1) throw ParameterError("exemplar_q needs at least one data row and one exemplar");
  LowDimAffinities<Scalar> out;
  out.kind = AffinityKind::exemplar_conditional;
  out.y_data = y_data;
  out.y_exemplars = y_exemplars;
  out.kernel.resize(n, z);
  Scalar total = 0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < z; ++j) {
      const Scalar k = Scalar(1) / (Scalar(1) + detail::sq_dist<Scalar>(out.y_data.row(i), out.y_exemplars.row(j)));
      out.kernel(i, j) = k;
      total += k;
    }
  }
  out.normalizer = total;
  out.Q = out.kernel / total;
  return out;
}

/// KL(P || Q) over all ordered pairs i != j and its gradient with respect to
/// the embedding coordinates.
template <class Scalar>
LossReport<Scalar> kl_pairwise(const AffinityBlock<Scalar>& p, const LowDimAffinities<Scalar>& q) {
  if (p.kind != AffinityKind::pairwise_joint || q.kind != AffinityKind::pairwise_joint) {
    throw ParameterError("kl_pairwise needs pairwise affinities");
  }
  if (p.P.rows() != q.Q.rows() || p.P.cols() != q.Q.cols()) {
    throw ShapeError("kl_pairwise: P is " + shape_string(p.P.rows(), p.P.cols()) + ", Q is " +
                     shape_string(q.Q.rows(), q.Q.cols()));
  }
  const Index n = p.P.rows();
  const Scalar mass = p.P.sum();
  LossReport<Scalar> out;
  out.normalizer = q.normalizer;
  out.grad_data = Matrix<Scalar>::Zero(n, q.y_data.cols());
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      out.value += detail::kl_term(p.P(i, j), q.Q(i, j));
      // d(loss)/d(d_ij) for the unordered pair, halved per ordered visit.
      const Scalar pij = Scalar(0.5) * (p.P(i, j) + p.P(j, i));
      const Scalar g = Scalar(4) * q.kernel(i, j) * (pij - mass * q.Q(i, j));
      for (Index c = 0; c < q.y_data.cols(); ++c) out.grad_data(i, c) += g * (q.y_data(i, c) - q.y_data(j, c));
    }
  }
  return out;
}

/// sum_i sum_j p_j|i log(p_j|i / q_j|i) with gradients for both the data and
/// the exemplar embeddings. Every q shares the global normalizer.
template <class Scalar>
LossReport<Scalar> kl_exemplar(const AffinityBlock<Scalar>& p, const LowDimAffinities<Scalar>& q) {
  if (p.kind != AffinityKind::exemplar_conditional || q.kind != AffinityKind::exemplar_conditional) {
    throw ParameterError("kl_exemplar needs exemplar-conditional affinities");
  }
  if (p.P.rows() != q.Q.rows() || p.P.cols() != q.Q.cols()) {
    throw ShapeError("kl_exemplar: P is " + shape_string(p.P.rows(), p.P.cols()) + ", Q is " +
                     shape_string(q.Q.rows(), q.Q.cols()));
  }
  const Index n = p.P.rows();
  const Index z = p.P.cols();
  const Scalar mass = p.P.sum();
  LossReport<Scalar> out;
  out.normalizer = q.normalizer;
  out.grad_data = Matrix<Scalar>::Zero(n, q.y_data.cols());
  out.grad_exemplars = Matrix<Scalar>::Zero(z, q.y_data.cols());
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < z; ++j) {
      const Scalar pij = p.P(i, j);
      const Scalar k = q.kernel(i, j);
      out.value += detail::kl_term(pij, q.Q(i, j));
      const Scalar g = Scalar(2) * (pij * k - mass * k * k / q.normalizer);
      detail::accumulate_pair(out.grad_data, out.grad_exemplars, q.y_data, q.y_exemplars, i, j, g);
    }
  }
  return out;
}

/// Exemplar KL restricted to each point's z_e nearest exemplars. The
/// normalizer contribution of point i is the kernel sum over its neighbors
/// plus K_e times the kernel sum over z_n exemplars drawn uniformly without
/// replacement from the non-neighbors.
template <class Scalar, class DerivedY, class DerivedE>
LossReport<Scalar> kl_exemplar_nce(const AffinityBlock<Scalar>& p_trunc, const NceNeighborhood& nbhd,
                                   const Eigen::MatrixBase<DerivedY>& y_data_in,
                                   const Eigen::MatrixBase<DerivedE>& y_ex_in, Rng& rng) {
  if (p_trunc.kind != AffinityKind::exemplar_conditional) {
    throw ParameterError("kl_exemplar_nce needs exemplar-conditional affinities");
  }
  const Matrix<Scalar> y_data = y_data_in;
  const Matrix<Scalar> y_ex = y_ex_in;
  const Index n = y_data.rows();
  const Index z = y_ex.rows();
  if (nbhd.z_e + nbhd.z_n > z) throw ParameterError("z_e + z_n must not exceed z");
  if (nbhd.neighbor_idx.rows() != n || nbhd.neighbor_idx.cols() != nbhd.z_e) {
    throw ShapeError("neighborhood does not match the batch");
  }
  if (p_trunc.P.rows() != n || p_trunc.P.cols() != z) throw ShapeError("kl_exemplar_nce: P does not match Y");
  if (y_data.cols() != y_ex.cols()) throw ShapeError("kl_exemplar_nce: embedding dimensions differ");

  const Index z_e = nbhd.z_e;
  const Index z_n = nbhd.z_n;
  const Scalar weight = static_cast<Scalar>(nbhd.K_e);

  Matrix<Scalar> kern_nb(n, z_e);
  Matrix<Scalar> kern_neg(n, z_n);
  IndexMatrix negatives(n, z_n);
  std::vector<char> is_neighbor(static_cast<std::size_t>(z));
  std::vector<Index> outside;
  Scalar total = 0;
  for (Index i = 0; i < n; ++i) {
    std::fill(is_neighbor.begin(), is_neighbor.end(), 0);
    for (Index k = 0; k < z_e; ++k) {
      const Index j = nbhd.neighbor_idx(i, k);
      is_neighbor[static_cast<std::size_t>(j)] = 1;
      kern_nb(i, k) = Scalar(1) / (Scalar(1) + detail::sq_dist<Scalar>(y_data.row(i), y_ex.row(j)));
      total += kern_nb(i, k);
    }
    if (z_n > 0) {
      outside.clear();
      for (Index j = 0; j < z; ++j) {
        if (!is_neighbor[static_cast<std::size_t>(j)]) outside.push_back(j);
      }
      const auto picks = rng.sample_without_replacement(outside.size(), static_cast<std::size_t>(z_n));
      for (Index k = 0; k < z_n; ++k) {
        const Index j = outside[picks[static_cast<std::size_t>(k)]];
        negatives(i, k) = j;
        kern_neg(i, k) = Scalar(1) / (Scalar(1) + detail::sq_dist<Scalar>(y_data.row(i), y_ex.row(j)));
        total += weight * kern_neg(i, k);
      }
    }
  }

  Scalar mass = 0;
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < z_e; ++k) mass += p_trunc.P(i, nbhd.neighbor_idx(i, k));
  }

  LossReport<Scalar> out;
  out.normalizer = total;
  out.grad_data = Matrix<Scalar>::Zero(n, y_data.cols());
  out.grad_exemplars = Matrix<Scalar>::Zero(z, y_data.cols());
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < z_e; ++k) {
      const Index j = nbhd.neighbor_idx(i, k);
      const Scalar pij = p_trunc.P(i, j);
      const Scalar kv = kern_nb(i, k);
      out.value += detail::kl_term(pij, kv / total);
      const Scalar g = Scalar(2) * (pij * kv - mass * kv * kv / total);
      detail::accumulate_pair(out.grad_data, out.grad_exemplars, y_data, y_ex, i, j, g);
    }
    for (Index k = 0; k < z_n; ++k) {
      const Index j = negatives(i, k);
      const Scalar kv = kern_neg(i, k);
      const Scalar g = Scalar(-2) * mass * weight * kv * kv / total;
      detail::accumulate_pair(out.grad_data, out.grad_exemplars, y_data, y_ex, i, j, g);
    }
  }
  return out;
}

}  // namespace ptsee

#endif  // PTSEE_LOSS_HPP
