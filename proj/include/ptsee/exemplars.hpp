#ifndef PTSEE_EXEMPLARS_HPP
#define PTSEE_EXEMPLARS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ptsee/core.hpp"
#include "ptsee/dataset.hpp"
#include "ptsee/rng.hpp"

namespace ptsee {

enum class Seeding { careful, random };

std::string to_string(Seeding s);
Seeding parse_seeding(const std::string& s);

/// Representative vectors that training points are compared against.
struct ExemplarSet {
  DenseMatrix exemplars;  // z x H
  Seeding seeding = Seeding::careful;
  std::size_t kmeans_iters = 0;
  std::uint64_t seed = 0;
  /// WCSS of the seeds followed by the WCSS after each Lloyd iteration.
  std::vector<double> wcss_history;
  /// reseeded[t] is true when iteration t re-seeded an empty cluster.
  std::vector<bool> reseeded;
  /// Cluster of each data row in the last iteration (empty when iters == 0).
  std::vector<Index> assignment;

  Index size() const { return exemplars.rows(); }
};

/// Scalable k-means++ (k-means||) seeding: one uniform seed, `rounds`
/// oversampling rounds with expected `oversampling` new candidates each,
/// then weighted k-means++ over the candidates.
/// Defaults: oversampling = 2z, rounds = 5.
DenseMatrix seed_scalable_kmeanspp(const Dataset& data, std::size_t z, Rng& rng,
                                   std::size_t oversampling = 0, std::size_t rounds = 5);

/// z distinct data rows drawn uniformly without replacement.
DenseMatrix seed_random(const Dataset& data, std::size_t z, Rng& rng);

/// Exactly `iters` Lloyd iterations starting from `centers`.
ExemplarSet kmeans_refine(const Dataset& data, const DenseMatrix& centers, std::size_t iters);

/// Index of the nearest center for each row; ties go to the lowest index.
std::vector<Index> assign_nearest(const DenseMatrix& points, const DenseMatrix& centers,
                                  DenseVector* sq_dist = nullptr);

/// Within-cluster sum of squares under nearest-center assignment.
double wcss(const DenseMatrix& points, const DenseMatrix& centers);

/// Seeding followed by refinement.
ExemplarSet select_exemplars(const Dataset& data, std::size_t z, Seeding seeding,
                             std::size_t kmeans_iters, std::uint64_t seed);

}  // namespace ptsee

#endif  // PTSEE_EXEMPLARS_HPP
