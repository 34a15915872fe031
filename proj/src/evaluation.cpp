#include "ptsee/evaluation.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace ptsee {

std::string to_string(Split s) { return s == Split::train ? "train" : "test"; }

std::vector<Index> nearest_rows(const DenseMatrix& reference, const Eigen::Ref<const DenseVector>& query,
                                std::size_t k, Index exclude) {
  if (query.size() != reference.cols()) throw ShapeError("nearest_rows: query dimension mismatch");
  std::vector<std::pair<double, Index>> cand;
  cand.reserve(static_cast<std::size_t>(reference.rows()));
  for (Index j = 0; j < reference.rows(); ++j) {
    if (j == exclude) continue;
    double d = 0.0;
    for (Index c = 0; c < reference.cols(); ++c) {
      const double t = reference(j, c) - query(c);
      d += t * t;
    }
    cand.emplace_back(d, j);
  }
  if (k > cand.size()) throw ParameterError("k exceeds the number of reference rows");
  std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k), cand.end());
  std::vector<Index> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = cand[i].second;
  return out;
}

namespace {

const std::vector<int>& require_labels(const EmbeddingResult& e, const char* what) {
  if (!e.labels) throw ParameterError(std::string(what) + " embedding has no labels");
  if (static_cast<Index>(e.labels->size()) != e.coords.rows()) {
    throw ShapeError(std::string(what) + " labels do not match rows");
  }
  return *e.labels;
}

int vote(const std::vector<Index>& neighbors, const std::vector<int>& labels) {
  std::map<int, std::size_t> counts;
  for (auto j : neighbors) ++counts[labels[static_cast<std::size_t>(j)]];
  int best = 0;
  std::size_t best_count = 0;
  for (const auto& [label, count] : counts) {  // ascending label order
    if (count > best_count) {
      best = label;
      best_count = count;
    }
  }
  return best;
}

KnnResult knn_impl(const EmbeddingResult& train, const DenseMatrix& queries, const std::vector<int>& truth,
                   std::size_t k, bool leave_one_out) {
  const auto& train_labels = require_labels(train, "training");
  if (k < 1) throw ParameterError("k must be at least 1");
  const std::size_t available = static_cast<std::size_t>(train.coords.rows()) - (leave_one_out ? 1 : 0);
  if (k > available) {
    throw ParameterError("k = " + std::to_string(k) + " exceeds the training size " + std::to_string(available));
  }
  if (queries.cols() != train.coords.cols()) throw ShapeError("embedding dimensions differ");
  KnnResult r;
  r.k = k;
  r.total = static_cast<std::size_t>(queries.rows());
  for (Index i = 0; i < queries.rows(); ++i) {
    const auto nn = nearest_rows(train.coords, queries.row(i).transpose(), k, leave_one_out ? i : -1);
    if (vote(nn, train_labels) != truth[static_cast<std::size_t>(i)]) ++r.misclassified;
  }
  r.error_rate = r.total ? static_cast<double>(r.misclassified) / static_cast<double>(r.total) : 0.0;
  return r;
}

}  // namespace

KnnResult knn_error(const EmbeddingResult& train, const EmbeddingResult& test, std::size_t k) {
  auto r = knn_impl(train, test.coords, require_labels(test, "test"), k, false);
  r.split = Split::test;
  return r;
}

KnnResult knn_train_error(const EmbeddingResult& train, std::size_t k) {
  auto r = knn_impl(train, train.coords, require_labels(train, "training"), k, true);
  r.split = Split::train;
  return r;
}

QualityScore quality_score(const DenseMatrix& high, const DenseMatrix& low, const DenseMatrix& reference_high,
                           const DenseMatrix& reference_low, std::size_t k) {
  if (high.rows() != low.rows()) throw ShapeError("quality_score: query high/low rows are not aligned");
  if (reference_high.rows() != reference_low.rows()) {
    throw ShapeError("quality_score: reference high/low rows are not aligned");
  }
  if (high.cols() != reference_high.cols() || low.cols() != reference_low.cols()) {
    throw ShapeError("quality_score: query and reference dimensions differ");
  }
  const bool same = high.rows() == reference_high.rows() && high == reference_high && low == reference_low;
  const std::size_t available = static_cast<std::size_t>(reference_high.rows()) - (same ? 1 : 0);
  if (k < 1 || k > available) throw ParameterError("quality_score: k must lie in [1, reference size]");

  QualityScore q;
  q.neighborhood_size_k = k;
  if (high.rows() == 0) return q;
  double total = 0.0;
  for (Index i = 0; i < high.rows(); ++i) {
    const Index self = same ? i : -1;
    auto nh = nearest_rows(reference_high, high.row(i).transpose(), k, self);
    auto nl = nearest_rows(reference_low, low.row(i).transpose(), k, self);
    std::sort(nh.begin(), nh.end());
    std::sort(nl.begin(), nl.end());
    std::vector<Index> common;
    std::set_intersection(nh.begin(), nh.end(), nl.begin(), nl.end(), std::back_inserter(common));
    total += static_cast<double>(common.size()) / static_cast<double>(k);
  }
  q.score = total / static_cast<double>(high.rows());
  return q;
}

QualityScore quality_score(const Dataset& high, const EmbeddingResult& low, const Dataset& reference_high,
                           const EmbeddingResult& reference_low, std::size_t k) {
  return quality_score(high.features, low.coords, reference_high.features, reference_low.coords, k);
}

std::string metric_name_knn(std::size_t k) { return std::to_string(k) + "nn_error"; }

void write_metrics_csv(const std::vector<MetricRow>& rows, const std::filesystem::path& path) {
  std::string out = "metric,k,split,value\n";
  for (const auto& r : rows) {
    out += r.metric + "," + std::to_string(r.k) + "," + r.split + "," + format_double(r.value) + "\n";
  }
  write_file_atomic(path, out);
}

}  // namespace ptsee
