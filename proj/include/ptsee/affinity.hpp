#ifndef PTSEE_AFFINITY_HPP
#define PTSEE_AFFINITY_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "ptsee/core.hpp"

namespace ptsee {

enum class AffinityKind { pairwise_joint, exemplar_conditional };

/// High-dimensional neighbor probabilities.
///
/// pairwise_joint: symmetric n x n joint distribution, zero diagonal, total 1.
/// exemplar_conditional: n x z, row i is the conditional distribution of
/// point i over the exemplars times `row_mass` (1/n unless rescaled to a batch).
template <class Scalar>
struct AffinityBlock {
  Matrix<Scalar> P;
  Vector<Scalar> sigmas;
  Scalar perplexity = 0;
  AffinityKind kind = AffinityKind::exemplar_conditional;
  Scalar row_mass = 0;
  /// Squared high-dimensional distances the probabilities were built from.
  Matrix<Scalar> sq_dists;

  template <class T>
  AffinityBlock<T> cast() const {
    AffinityBlock<T> out;
    out.P = P.template cast<T>();
    out.sigmas = sigmas.template cast<T>();
    out.perplexity = static_cast<T>(perplexity);
    out.kind = kind;
    out.row_mass = static_cast<T>(row_mass);
    out.sq_dists = sq_dists.template cast<T>();
    return out;
  }
};

using IndexMatrix = Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Nearest exemplars per data point plus the negative-sampling setup used to
/// approximate the low-dimensional normalizer.
struct NceNeighborhood {
  IndexMatrix neighbor_idx;  // n x z_e, ascending high-dimensional distance
  Index z = 0;
  Index z_e = 0;
  Index z_n = 0;
  double K_e = 0.0;

  NceNeighborhood subset(const std::vector<std::size_t>& rows) const {
    NceNeighborhood out = *this;
    out.neighbor_idx.resize(static_cast<Index>(rows.size()), neighbor_idx.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      out.neighbor_idx.row(static_cast<Index>(r)) = neighbor_idx.row(static_cast<Index>(rows[r]));
    }
    return out;
  }
};

/// Unbiased weight for z_n uniform samples standing in for z - z_e terms.
inline double unbiased_nce_weight(Index z, Index z_e, Index z_n) {
  return z_n > 0 ? static_cast<double>(z - z_e) / static_cast<double>(z_n) : 0.0;
}

template <class Scalar>
struct SigmaSearchResult {
  Scalar sigma = 0;
  Vector<Scalar> probs;
  /// 2^H of `probs`, H in bits.
  Scalar perplexity = 0;
  int iterations = 0;
};

namespace detail {

template <class Scalar>
struct GaussianRow {
  const Vector<Scalar>& shifted;  // distances minus their minimum

  // Entropy in nats of the normalized kernel at bandwidth exp(log_sigma).
  Scalar entropy(Scalar log_sigma, Vector<Scalar>* probs = nullptr) const {
    const Scalar beta = Scalar(0.5) * std::exp(Scalar(-2) * log_sigma);
    Vector<Scalar> w = (-beta * shifted.array()).exp().matrix();
    const Scalar total = w.sum();
    w /= total;
    const Scalar h = std::log(total) + beta * w.dot(shifted);
    if (probs) *probs = std::move(w);
    return h;
  }
};

}  // namespace detail

/// Gaussian bandwidth whose conditional distribution over the candidates has
/// perplexity `u`. Binary search on log(sigma): the bracket grows from a
/// data-driven guess within [1e-20, 1e20], then at most 64 bisection steps.
///
/// All-zero distances raise DegenerateDistributionError. Equal non-zero
/// distances give the uniform distribution (perplexity equals the candidate
/// count for every sigma). A target outside the reachable range is clamped
/// to the nearest bracket bound.
template <class Derived>
SigmaSearchResult<typename Derived::Scalar> search_sigma(const Eigen::MatrixBase<Derived>& dists_row,
                                                         typename Derived::Scalar u) {
  using Scalar = typename Derived::Scalar;
  const Vector<Scalar> d = dists_row.derived().reshaped();
  const Index count = d.size();
  if (count < 2) throw ParameterError("search_sigma needs at least 2 candidate distances");
  if (!d.allFinite() || d.minCoeff() < 0) {
    throw ParameterError("search_sigma: distances must be finite and non-negative");
  }
  if (!(u > 1) || u > static_cast<Scalar>(count)) {
    throw ParameterError("perplexity must lie in (1, " + std::to_string(count) + "]");
  }
  if (d.maxCoeff() == 0) {
    throw DegenerateDistributionError("all candidate distances are zero; perplexity is unattainable");
  }

  const Vector<Scalar> shifted = (d.array() - d.minCoeff()).matrix();
  SigmaSearchResult<Scalar> out;
  if (shifted.maxCoeff() == 0) {
    out.sigma = std::sqrt(d.minCoeff());
    out.probs = Vector<Scalar>::Constant(count, Scalar(1) / static_cast<Scalar>(count));
    out.perplexity = static_cast<Scalar>(count);
    return out;
  }

  const detail::GaussianRow<Scalar> row{shifted};
  const Scalar target = std::log(u);
  const Scalar log_min = std::log(Scalar(1e-20));
  const Scalar log_max = std::log(Scalar(1e20));
  const Scalar tol = Scalar(1e-13);

  const Scalar mean_shift = shifted.mean();
  Scalar guess = Scalar(0.5) * std::log(mean_shift);
  guess = std::clamp(guess, log_min, log_max);

  // Entropy increases with sigma.
  Scalar lo = guess, hi = guess;
  Scalar step = std::log(Scalar(2));
  while (row.entropy(hi) < target && hi < log_max) {
    lo = hi;
    hi = std::min(log_max, hi + step);
    step *= 2;
  }
  step = std::log(Scalar(2));
  while (row.entropy(lo) > target && lo > log_min) {
    hi = std::max(hi, lo);
    lo = std::max(log_min, lo - step);
    step *= 2;
  }

  Scalar mid = Scalar(0.5) * (lo + hi);
  if (row.entropy(hi) < target) {
    mid = hi;
  } else if (row.entropy(lo) > target) {
    mid = lo;
  } else {
    for (int it = 0; it < 64; ++it) {
      mid = Scalar(0.5) * (lo + hi);
      const Scalar h = row.entropy(mid);
      out.iterations = it + 1;
      if (std::abs(h - target) < tol) break;
      if (h < target) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
  }
  const Scalar h = row.entropy(mid, &out.probs);
  out.sigma = std::exp(mid);
  out.perplexity = std::exp(h);
  return out;
}

/// Symmetric joint probabilities over all pairs of rows of `x`:
/// p_ij = (p_j|i + p_i|j) / 2n, with p_i|i = 0.
template <class Derived>
AffinityBlock<typename Derived::Scalar> pairwise_affinities(const Eigen::MatrixBase<Derived>& x,
                                                            typename Derived::Scalar u) {
  using Scalar = typename Derived::Scalar;
  const Index n = x.rows();
  if (n < 3) throw ParameterError("pairwise affinities need at least 3 points");
  if (!(u > 1) || !(u < static_cast<Scalar>(n - 1))) {
    throw ParameterError("perplexity must lie in (1, n-1) = (1, " + std::to_string(n - 1) + ")");
  }
  AffinityBlock<Scalar> block;
  block.kind = AffinityKind::pairwise_joint;
  block.perplexity = u;
  block.row_mass = Scalar(1) / static_cast<Scalar>(n);
  block.sq_dists = pairwise_sq_dists(x);
  block.sigmas.resize(n);

  Matrix<Scalar> cond = Matrix<Scalar>::Zero(n, n);
  Vector<Scalar> others(n - 1);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0, k = 0; j < n; ++j) {
      if (j != i) others(k++) = block.sq_dists(i, j);
    }
    const auto fit = search_sigma(others, u);
    block.sigmas(i) = fit.sigma;
    for (Index j = 0, k = 0; j < n; ++j) {
      if (j != i) cond(i, j) = fit.probs(k++);
    }
  }
  block.P = (cond + cond.transpose()) / (Scalar(2) * static_cast<Scalar>(n));
  return block;
}

/// Conditional probabilities of each data row over the exemplars, every row
/// scaled to total 1/n.
template <class DerivedX, class DerivedE>
AffinityBlock<typename DerivedX::Scalar> exemplar_affinities(const Eigen::MatrixBase<DerivedX>& x,
                                                             const Eigen::MatrixBase<DerivedE>& exemplars,
                                                             typename DerivedX::Scalar u) {
  using Scalar = typename DerivedX::Scalar;
  const Index n = x.rows();
  const Index z = exemplars.rows();
  if (z < 2) throw ParameterError("exemplar affinities need at least 2 exemplars");
  if (!(u > 1) || !(u < static_cast<Scalar>(z))) {
    throw ParameterError("perplexity must lie in (1, z) = (1, " + std::to_string(z) + ")");
  }
  AffinityBlock<Scalar> block;
  block.kind = AffinityKind::exemplar_conditional;
  block.perplexity = u;
  block.row_mass = n > 0 ? Scalar(1) / static_cast<Scalar>(n) : Scalar(0);
  block.sq_dists = pairwise_sq_dists(x, exemplars);
  block.sigmas.resize(n);
  block.P.resize(n, z);
  for (Index i = 0; i < n; ++i) {
    const auto fit = search_sigma(block.sq_dists.row(i), u);
    block.sigmas(i) = fit.sigma;
    block.P.row(i) = fit.probs.transpose() * block.row_mass;
  }
  return block;
}

/// Rows of an exemplar-conditional block, rescaled so each row sums to
/// 1/rows.size() and the selection is a distribution over its pairs.
template <class Scalar>
AffinityBlock<Scalar> exemplar_rows(const AffinityBlock<Scalar>& block, const std::vector<std::size_t>& rows) {
  if (block.kind != AffinityKind::exemplar_conditional) {
    throw ParameterError("exemplar_rows needs an exemplar-conditional block");
  }
  AffinityBlock<Scalar> out;
  out.kind = block.kind;
  out.perplexity = block.perplexity;
  out.row_mass = Scalar(1) / static_cast<Scalar>(rows.size());
  out.P = gather_rows(block.P, rows) * (out.row_mass / block.row_mass);
  out.sq_dists = gather_rows(block.sq_dists, rows);
  out.sigmas.resize(static_cast<Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) out.sigmas(static_cast<Index>(r)) = block.sigmas(static_cast<Index>(rows[r]));
  return out;
}

/// The z_e nearest exemplars of each row (ascending distance, ties to the
/// lower index). Accepts z_e == z, which yields the full neighborhood.
template <class Scalar>
NceNeighborhood nearest_exemplars(const AffinityBlock<Scalar>& block, Index z_e) {
  if (block.kind != AffinityKind::exemplar_conditional) {
    throw ParameterError("nearest_exemplars needs an exemplar-conditional block");
  }
  const Index n = block.P.rows();
  const Index z = block.P.cols();
  if (z_e < 1 || z_e > z) throw ParameterError("z_e must lie in [1, z]");
  NceNeighborhood nb;
  nb.z = z;
  nb.z_e = z_e;
  nb.neighbor_idx.resize(n, z_e);
  std::vector<Index> order(static_cast<std::size_t>(z));
  for (Index i = 0; i < n; ++i) {
    std::iota(order.begin(), order.end(), Index{0});
    std::partial_sort(order.begin(), order.begin() + z_e, order.end(), [&](Index a, Index b) {
      const Scalar da = block.sq_dists(i, a);
      const Scalar db = block.sq_dists(i, b);
      return da < db || (da == db && a < b);
    });
    for (Index k = 0; k < z_e; ++k) nb.neighbor_idx(i, k) = order[static_cast<std::size_t>(k)];
  }
  return nb;
}

/// Keeps each row's z_e nearest exemplars, zeroes the rest and renormalizes
/// the kept entries to the original row mass.
template <class Scalar>
std::pair<AffinityBlock<Scalar>, NceNeighborhood> truncate_for_nce(const AffinityBlock<Scalar>& block, Index z_e,
                                                                   Index z_n = 0,
                                                                   std::optional<double> K_e = std::nullopt) {
  if (block.kind != AffinityKind::exemplar_conditional) {
    throw ParameterError("truncate_for_nce needs an exemplar-conditional block");
  }
  const Index z = block.P.cols();
  if (z_e < 1 || z_e >= z) throw ParameterError("truncate_for_nce needs 1 <= z_e < z");
  if (z_n < 0 || z_e + z_n > z) throw ParameterError("z_e + z_n must not exceed z");
  NceNeighborhood nb = nearest_exemplars(block, z_e);
  nb.z_n = z_n;
  nb.K_e = K_e ? *K_e : unbiased_nce_weight(z, z_e, z_n);

  AffinityBlock<Scalar> out = block;
  out.P.setZero();
  for (Index i = 0; i < block.P.rows(); ++i) {
    Scalar kept = 0;
    for (Index k = 0; k < z_e; ++k) kept += block.P(i, nb.neighbor_idx(i, k));
    const Scalar total = block.P.row(i).sum();
    for (Index k = 0; k < z_e; ++k) {
      const Index j = nb.neighbor_idx(i, k);
      out.P(i, j) = kept > 0 ? block.P(i, j) * (total / kept) : total / static_cast<Scalar>(z_e);
    }
  }
  return {std::move(out), std::move(nb)};
}

}  // namespace ptsee

#endif  // PTSEE_AFFINITY_HPP
