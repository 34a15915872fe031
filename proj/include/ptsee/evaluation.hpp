#ifndef PTSEE_EVALUATION_HPP
#define PTSEE_EVALUATION_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "ptsee/core.hpp"
#include "ptsee/dataset.hpp"

namespace ptsee {

enum class Split { train, test };
std::string to_string(Split s);

struct KnnResult {
  std::size_t k = 1;
  double error_rate = 0.0;
  Split split = Split::test;
  std::size_t misclassified = 0;
  std::size_t total = 0;
};

/// Indices of the k rows of `reference` nearest to `query` (squared
/// Euclidean), nearest first, distance ties to the lower index. `exclude`
/// removes one reference row from consideration.
std::vector<Index> nearest_rows(const DenseMatrix& reference, const Eigen::Ref<const DenseVector>& query,
                                std::size_t k, Index exclude = -1);

/// Brute-force kNN classification of the test embedding against the
/// training embedding. Vote ties go to the smallest label.
KnnResult knn_error(const EmbeddingResult& train, const EmbeddingResult& test, std::size_t k);

/// Leave-one-out kNN error on the training embedding itself.
KnnResult knn_train_error(const EmbeddingResult& train, std::size_t k);

struct QualityScore {
  std::size_t neighborhood_size_k = 0;
  double score = 0.0;
};

/// Mean fraction of each query's k high-dimensional nearest reference rows
/// that are also among its k low-dimensional nearest reference rows. When
/// the queries are the reference collection itself, each query is excluded
/// from its own neighborhood.
QualityScore quality_score(const DenseMatrix& high, const DenseMatrix& low, const DenseMatrix& reference_high,
                           const DenseMatrix& reference_low, std::size_t k);

QualityScore quality_score(const Dataset& high, const EmbeddingResult& low, const Dataset& reference_high,
                           const EmbeddingResult& reference_low, std::size_t k);

struct MetricRow {
  std::string metric;
  std::size_t k = 0;
  std::string split;
  double value = 0.0;
};

/// CSV with header "metric,k,split,value".
void write_metrics_csv(const std::vector<MetricRow>& rows, const std::filesystem::path& path);
std::string metric_name_knn(std::size_t k);

}  // namespace ptsee

#endif  // PTSEE_EVALUATION_HPP
