#include "ptsee/exemplars.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace ptsee {

std::string to_string(Seeding s) { return s == Seeding::careful ? "careful" : "random"; }

Seeding parse_seeding(const std::string& s) {
  if (s == "careful") return Seeding::careful;
  if (s == "random") return Seeding::random;
  throw ParameterError("unknown seeding '" + s + "' (expected careful or random)");
}

namespace {

void check_z(const Dataset& data, std::size_t z) {
  if (z < 1) throw ParameterError("number of exemplars must be at least 1");
  if (z > static_cast<std::size_t>(data.size())) {
    throw ParameterError("cannot select " + std::to_string(z) + " exemplars from " +
                         std::to_string(data.size()) + " points");
  }
}

// Shrinks `best` with the distances to `centers`, recording the argmin in
// `owner` (offset by `first_index`). Strict comparison keeps earlier centers
// on ties.
void update_min_dists(const DenseMatrix& points, const DenseMatrix& centers, Index first_index,
                      DenseVector& best, std::vector<Index>& owner) {
  constexpr Index kBlock = 512;
  for (Index start = 0; start < centers.rows(); start += kBlock) {
    const Index len = std::min(kBlock, centers.rows() - start);
    const DenseMatrix d = pairwise_sq_dists(points, centers.middleRows(start, len));
    for (Index i = 0; i < points.rows(); ++i) {
      for (Index j = 0; j < len; ++j) {
        if (d(i, j) < best(i)) {
          best(i) = d(i, j);
          owner[static_cast<std::size_t>(i)] = first_index + start + j;
        }
      }
    }
  }
}

// Draws an index with probability proportional to non-negative weights.
// Callers guarantee a positive total.
std::size_t sample_weighted(const std::vector<double>& w, Rng& rng) {
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  const double target = rng.uniform() * total;
  double acc = 0.0;
  std::size_t last_positive = w.size();
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] <= 0.0) continue;
    acc += w[i];
    last_positive = i;
    if (target < acc) return i;
  }
  return last_positive;
}

}  // namespace

std::vector<Index> assign_nearest(const DenseMatrix& points, const DenseMatrix& centers,
                                  DenseVector* sq_dist) {
  DenseVector best = DenseVector::Constant(points.rows(), std::numeric_limits<double>::infinity());
  std::vector<Index> owner(static_cast<std::size_t>(points.rows()), 0);
  update_min_dists(points, centers, 0, best, owner);
  if (sq_dist) *sq_dist = best;
  return owner;
}

double wcss(const DenseMatrix& points, const DenseMatrix& centers) {
  DenseVector d;
  assign_nearest(points, centers, &d);
  return d.sum();
}

DenseMatrix seed_random(const Dataset& data, std::size_t z, Rng& rng) {
  check_z(data, z);
  const auto idx = rng.sample_without_replacement(static_cast<std::size_t>(data.size()), z);
  return gather_rows(data.features, idx);
}

DenseMatrix seed_scalable_kmeanspp(const Dataset& data, std::size_t z, Rng& rng,
                                   std::size_t oversampling, std::size_t rounds) {
  check_z(data, z);
  if (oversampling == 0) oversampling = 2 * z;
  const DenseMatrix& x = data.features;
  const auto n = static_cast<std::size_t>(x.rows());

  std::vector<std::size_t> candidates;
  std::vector<bool> is_candidate(n, false);
  DenseVector best = DenseVector::Constant(x.rows(), std::numeric_limits<double>::infinity());
  std::vector<Index> owner(n, 0);

  auto add_candidates = [&](const std::vector<std::size_t>& fresh) {
    if (fresh.empty()) return;
    const auto first = static_cast<Index>(candidates.size());
    for (auto i : fresh) {
      candidates.push_back(i);
      is_candidate[i] = true;
    }
    update_min_dists(x, gather_rows(x, fresh), first, best, owner);
  };

  add_candidates({static_cast<std::size_t>(rng.uniform_index(n))});

  for (std::size_t r = 0; r < rounds; ++r) {
    const double cost = best.sum();
    if (cost <= 0.0) break;
    std::vector<std::size_t> fresh;
    for (std::size_t i = 0; i < n; ++i) {
      const double p = std::min(1.0, static_cast<double>(oversampling) * best(static_cast<Index>(i)) / cost);
      if (rng.uniform() < p && !is_candidate[i]) fresh.push_back(i);
    }
    add_candidates(fresh);
  }

  // Too few candidates: top up with D^2 draws over the whole data set,
  // then uniformly among the remaining rows once all mass is zero.
  while (candidates.size() < z) {
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = is_candidate[i] ? 0.0 : best(static_cast<Index>(i));
    std::size_t pick;
    if (std::accumulate(w.begin(), w.end(), 0.0) > 0.0) {
      pick = sample_weighted(w, rng);
    } else {
      std::vector<std::size_t> rest;
      for (std::size_t i = 0; i < n; ++i) {
        if (!is_candidate[i]) rest.push_back(i);
      }
      pick = rest[rng.uniform_index(rest.size())];
    }
    add_candidates({pick});
  }

  // Weight of each candidate: number of points it is closest to.
  const std::size_t m = candidates.size();
  std::vector<double> weight(m, 0.0);
  for (std::size_t i = 0; i < n; ++i) weight[static_cast<std::size_t>(owner[i])] += 1.0;

  // Weighted k-means++ over the candidate set.
  const DenseMatrix cand = gather_rows(x, candidates);
  std::vector<bool> chosen(m, false);
  std::vector<std::size_t> picks;
  DenseVector cbest = DenseVector::Constant(static_cast<Index>(m), std::numeric_limits<double>::infinity());
  auto choose = [&](std::size_t c) {
    chosen[c] = true;
    picks.push_back(candidates[c]);
    const DenseMatrix d = pairwise_sq_dists(cand, cand.row(static_cast<Index>(c)));
    cbest = cbest.cwiseMin(d.col(0));
  };

  choose(sample_weighted(weight, rng));
  while (picks.size() < z) {
    std::vector<double> w(m);
    for (std::size_t c = 0; c < m; ++c) w[c] = chosen[c] ? 0.0 : weight[c] * cbest(static_cast<Index>(c));
    if (std::accumulate(w.begin(), w.end(), 0.0) > 0.0) {
      choose(sample_weighted(w, rng));
    } else {
      std::vector<std::size_t> rest;
      for (std::size_t c = 0; c < m; ++c) {
        if (!chosen[c]) rest.push_back(c);
      }
      choose(rest[rng.uniform_index(rest.size())]);
    }
  }
  return gather_rows(x, picks);
}

ExemplarSet kmeans_refine(const Dataset& data, const DenseMatrix& centers, std::size_t iters) {
  const DenseMatrix& x = data.features;
  if (centers.cols() != x.cols()) {
    throw ShapeError("kmeans_refine: centers have " + std::to_string(centers.cols()) +
                     " columns, data has " + std::to_string(x.cols()));
  }
  ExemplarSet out;
  out.exemplars = centers;
  out.kmeans_iters = iters;
  DenseMatrix& c = out.exemplars;
  const Index z = c.rows();

  out.wcss_history.push_back(x.rows() ? wcss(x, c) : 0.0);
  for (std::size_t t = 0; t < iters; ++t) {
    DenseVector d;
    const auto owner = assign_nearest(x, c, &d);

    DenseMatrix sums = DenseMatrix::Zero(z, x.cols());
    std::vector<Index> counts(static_cast<std::size_t>(z), 0);
    for (Index i = 0; i < x.rows(); ++i) {
      sums.row(owner[static_cast<std::size_t>(i)]) += x.row(i);
      ++counts[static_cast<std::size_t>(owner[static_cast<std::size_t>(i)])];
    }
    bool reseeded = false;
    for (Index j = 0; j < z; ++j) {
      if (counts[static_cast<std::size_t>(j)] > 0) {
        c.row(j) = sums.row(j) / static_cast<double>(counts[static_cast<std::size_t>(j)]);
      } else if (x.rows() > 0) {
        // Empty cluster: move it onto the point farthest from its center.
        Index far = 0;
        d.maxCoeff(&far);
        c.row(j) = x.row(far);
        d(far) = 0.0;
        reseeded = true;
      }
    }
    out.reseeded.push_back(reseeded);
    out.assignment = owner;
    out.wcss_history.push_back(x.rows() ? wcss(x, c) : 0.0);
  }
  return out;
}

ExemplarSet select_exemplars(const Dataset& data, std::size_t z, Seeding seeding,
                             std::size_t kmeans_iters, std::uint64_t seed) {
  Rng rng(seed);
  const DenseMatrix init =
      seeding == Seeding::careful ? seed_scalable_kmeanspp(data, z, rng) : seed_random(data, z, rng);
  ExemplarSet out = kmeans_refine(data, init, kmeans_iters);
  out.seeding = seeding;
  out.seed = seed;
  return out;
}

}  // namespace ptsee
