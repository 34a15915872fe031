#include <doctest.h>

#include <set>

#include "ptsee/dataset.hpp"
#include "ptsee/exemplars.hpp"
#include "support.hpp"

using namespace ptsee;

namespace {

Dataset make_dataset(DenseMatrix x) {
  Dataset d;
  d.features = std::move(x);
  return d;
}

// Two well-separated Gaussian-ish blobs in 2D, 15 points each.
Dataset two_blobs(std::uint64_t seed) {
  Rng rng(seed);
  DenseMatrix x(30, 2);
  for (Index i = 0; i < 30; ++i) {
    const double cx = i < 15 ? 0.0 : 10.0;
    x(i, 0) = cx + rng.uniform() - 0.5;
    x(i, 1) = rng.uniform() - 0.5;
  }
  return make_dataset(x);
}

std::set<std::vector<double>> row_set(const DenseMatrix& m) {
  std::set<std::vector<double>> out;
  for (Index i = 0; i < m.rows(); ++i) out.insert({m.row(i).data(), m.row(i).data() + m.cols()});
  return out;
}

}  // namespace

TEST_CASE("k-means|| seeding: z == n selects every row") {
  Rng data_rng(1);
  const Dataset d = make_dataset(testing::random_matrix(12, 3, data_rng));
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    CHECK(row_set(seed_scalable_kmeanspp(d, 12, rng)) == row_set(d.features));
  }
}

TEST_CASE("k-means|| seeding: z == 1 picks a data row") {
  Rng data_rng(2);
  const Dataset d = make_dataset(testing::random_matrix(20, 3, data_rng));
  Rng rng(5);
  const DenseMatrix c = seed_scalable_kmeanspp(d, 1, rng);
  REQUIRE(c.rows() == 1);
  CHECK(row_set(d.features).count({c.row(0).data(), c.row(0).data() + 3}) == 1);
}

TEST_CASE("k-means|| seeding: one center per blob") {
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Dataset d = two_blobs(1000 + seed);
    Rng rng(seed);
    const DenseMatrix c = seed_scalable_kmeanspp(d, 2, rng);
    if ((c(0, 0) < 5.0) != (c(1, 0) < 5.0)) ++hits;
  }
  CHECK(hits >= 95);
}

TEST_CASE("seeding rejects z > n or z == 0") {
  Rng data_rng(3);
  const Dataset d = make_dataset(testing::random_matrix(5, 2, data_rng));
  Rng rng(0);
  CHECK_THROWS_AS(seed_scalable_kmeanspp(d, 6, rng), ParameterError);
  CHECK_THROWS_AS(seed_random(d, 6, rng), ParameterError);
  CHECK_THROWS_AS(seed_random(d, 0, rng), ParameterError);
}

TEST_CASE("random seeding: distinct rows, deterministic, exhaustive at z == n") {
  Rng data_rng(4);
  const Dataset d = make_dataset(testing::random_matrix(1000, 3, data_rng));
  Rng a(9), b(9);
  const DenseMatrix ca = seed_random(d, 100, a);
  CHECK(ca == seed_random(d, 100, b));
  CHECK(row_set(ca).size() == 100);

  const Dataset small = d.head(20);
  Rng c(1);
  CHECK(row_set(seed_random(small, 20, c)) == row_set(small.features));
}

TEST_CASE("kmeans_refine: zero iterations and fixed point") {
  Rng data_rng(5);
  const Dataset d = make_dataset(testing::random_matrix(10, 2, data_rng));
  const DenseMatrix centers = d.features.topRows(3);
  CHECK(kmeans_refine(d, centers, 0).exemplars == centers);

  const ExemplarSet fixed = kmeans_refine(d, d.features, 5);
  CHECK(fixed.exemplars == d.features);
  CHECK(wcss(d.features, fixed.exemplars) == 0.0);
}

TEST_CASE("kmeans_refine: WCSS non-increasing and centers are cluster means") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng data_rng(seed);
    const Dataset d = make_dataset(testing::random_matrix(200, 4, data_rng));
    Rng rng(seed + 100);
    const ExemplarSet set = kmeans_refine(d, seed_random(d, 8, rng), 10);
    REQUIRE(set.wcss_history.size() == 11);
    for (std::size_t t = 1; t < set.wcss_history.size(); ++t) {
      if (!set.reseeded[t - 1]) CHECK(set.wcss_history[t] <= set.wcss_history[t - 1] + 1e-12);
    }
    // Means of the final assignment.
    for (Index c = 0; c < set.size(); ++c) {
      DenseVector mean = DenseVector::Zero(4);
      int count = 0;
      for (Index i = 0; i < d.size(); ++i) {
        if (set.assignment[static_cast<std::size_t>(i)] == c) {
          mean += d.features.row(i).transpose();
          ++count;
        }
      }
      if (count > 0) CHECK((set.exemplars.row(c).transpose() - mean / count).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
}

TEST_CASE("kmeans_refine re-seeds empty clusters") {
  DenseMatrix x(4, 1);
  x << 0, 1, 10, 11;
  DenseMatrix centers(3, 1);
  centers << 0.5, 10.5, 1000;
  const ExemplarSet set = kmeans_refine(make_dataset(x), centers, 1);
  CHECK(set.reseeded[0]);
  CHECK(set.exemplars.allFinite());
  CHECK(set.exemplars(2, 0) != 1000.0);
}

TEST_CASE("assignment ties go to the lowest center index") {
  DenseMatrix pts(1, 1), centers(2, 1);
  pts << 0;
  centers << -1, 1;
  CHECK(assign_nearest(pts, centers)[0] == 0);
}

TEST_CASE("k-means on two blobs reaches the exhaustive optimum") {
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Dataset d = two_blobs(7);
    const double best = oracle::best_two_means_wcss(testing::to_grid(d.features));
    const ExemplarSet set = select_exemplars(d, 2, Seeding::careful, 10, seed);
    if (std::abs(wcss(d.features, set.exemplars) - best) <= 1e-9) ++hits;
  }
  CHECK(hits >= 95);
}

TEST_CASE("select_exemplars is deterministic and distinct") {
  Rng data_rng(8);
  const Dataset d = make_dataset(testing::random_matrix(300, 5, data_rng));
  const ExemplarSet a = select_exemplars(d, 20, Seeding::careful, 10, 42);
  const ExemplarSet b = select_exemplars(d, 20, Seeding::careful, 10, 42);
  CHECK(a.exemplars == b.exemplars);
  CHECK(row_set(a.exemplars).size() == 20);
  CHECK(a.seeding == Seeding::careful);
  CHECK(a.seed == 42);
  CHECK(parse_seeding("random") == Seeding::random);
  CHECK_THROWS_AS(parse_seeding("smart"), ParameterError);
}
