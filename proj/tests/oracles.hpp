#ifndef PTSEE_TESTS_ORACLES_HPP
#define PTSEE_TESTS_ORACLES_HPP

// Literal scalar-loop reference implementations. They share no code with the
// library: plain nested vectors, no Eigen, no helpers from include/.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

using Grid = std::vector<std::vector<double>>;

inline Grid matmul(const Grid& a, const Grid& b) {
  const std::size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
  Grid c(n, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t t = 0; t < k; ++t) c[i][j] += a[i][t] * b[t][j];
  return c;
}

inline double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t c = 0; c < a.size(); ++c) s += (a[c] - b[c]) * (a[c] - b[c]);
  return s;
}

inline Grid sq_dists(const Grid& a, const Grid& b) {
  Grid d(a.size(), std::vector<double>(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) d[i][j] = sq_dist(a[i], b[j]);
  return d;
}

// Gaussian conditional of point i over `candidates` at bandwidth sigma.
inline std::vector<double> gaussian_conditional(const std::vector<double>& x, const Grid& candidates, double sigma,
                                                long skip = -1) {
  std::vector<double> w(candidates.size(), 0.0);
  double total = 0;
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    if (static_cast<long>(j) == skip) continue;
    w[j] = std::exp(-sq_dist(x, candidates[j]) / (2 * sigma * sigma));
    total += w[j];
  }
  for (auto& v : w) v /= total;
  return w;
}

inline double perplexity_bits(const std::vector<double>& p) {
  double h = 0;
  for (double v : p)
    if (v > 0) h -= v * std::log2(v);
  return std::pow(2.0, h);
}

// Joint pairwise P from per-point bandwidths.
inline Grid pairwise_p(const Grid& x, const std::vector<double>& sigmas) {
  const std::size_t n = x.size();
  Grid cond(n);
  for (std::size_t i = 0; i < n; ++i) cond[i] = gaussian_conditional(x[i], x, sigmas[i], static_cast<long>(i));
  Grid p(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) p[i][j] = (cond[i][j] + cond[j][i]) / (2.0 * n);
  return p;
}

// Exemplar-conditional P, each row scaled by 1/n.
inline Grid exemplar_p(const Grid& x, const Grid& e, const std::vector<double>& sigmas) {
  Grid p(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    p[i] = gaussian_conditional(x[i], e, sigmas[i]);
    for (auto& v : p[i]) v /= static_cast<double>(x.size());
  }
  return p;
}

inline Grid pairwise_q(const Grid& y) {
  const std::size_t n = y.size();
  Grid q(n, std::vector<double>(n, 0.0));
  double total = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) {
        q[i][j] = 1.0 / (1.0 + sq_dist(y[i], y[j]));
        total += q[i][j];
      }
  for (auto& row : q)
    for (auto& v : row) v /= total;
  return q;
}

inline Grid exemplar_q(const Grid& yd, const Grid& ye) {
  Grid q(yd.size(), std::vector<double>(ye.size()));
  double total = 0;
  for (std::size_t i = 0; i < yd.size(); ++i)
    for (std::size_t j = 0; j < ye.size(); ++j) {
      q[i][j] = 1.0 / (1.0 + sq_dist(yd[i], ye[j]));
      total += q[i][j];
    }
  for (auto& row : q)
    for (auto& v : row) v /= total;
  return q;
}

inline double kl(const Grid& p, const Grid& q) {
  double s = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < p[i].size(); ++j)
      if (p[i][j] > 0) s += p[i][j] * std::log(p[i][j] / q[i][j]);
  return s;
}

// y_s = sum_k V[s][k] sigma(sum_f W[f][k] (sum_h C[h][f] x'_h)^O + b_k)
inline Grid high_order_forward(const Grid& C, const Grid& W, const std::vector<double>& b, const Grid& V, int order,
                               const Grid& x) {
  const std::size_t H = C.size() - 1, F = W.size(), m = b.size(), h = V.size();
  Grid y(x.size(), std::vector<double>(h, 0.0));
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t k = 0; k < m; ++k) {
      double a = b[k];
      for (std::size_t f = 0; f < F; ++f) {
        double proj = C[H][f];
        for (std::size_t c = 0; c < H; ++c) proj += C[c][f] * x[i][c];
        a += W[f][k] * std::pow(proj, order);
      }
      const double hid = 1.0 / (1.0 + std::exp(-a));
      for (std::size_t s = 0; s < h; ++s) y[i][s] += V[s][k] * hid;
    }
  }
  return y;
}

enum class Act { relu, logistic, identity };

inline Grid ffn_forward(const std::vector<Grid>& weights, const std::vector<std::vector<double>>& biases, Act act,
                        const Grid& x) {
  Grid cur = x;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    const std::size_t out = biases[l].size();
    Grid next(cur.size(), std::vector<double>(out));
    for (std::size_t i = 0; i < cur.size(); ++i)
      for (std::size_t j = 0; j < out; ++j) {
        double a = biases[l][j];
        for (std::size_t t = 0; t < cur[i].size(); ++t) a += cur[i][t] * weights[l][t][j];
        if (l + 1 < weights.size()) {
          if (act == Act::relu) a = a > 0 ? a : 0;
          else if (act == Act::logistic) a = 1.0 / (1.0 + std::exp(-a));
        }
        next[i][j] = a;
      }
    cur = std::move(next);
  }
  return cur;
}

// Exhaustive kNN: full sort of (distance, index), majority vote, ties to the
// smallest label.
inline int knn_predict(const Grid& train, const std::vector<int>& labels, const std::vector<double>& q, std::size_t k,
                       long exclude = -1) {
  std::vector<std::pair<double, std::size_t>> all;
  for (std::size_t j = 0; j < train.size(); ++j)
    if (static_cast<long>(j) != exclude) all.push_back({sq_dist(train[j], q), j});
  std::sort(all.begin(), all.end());
  std::map<int, int> votes;
  for (std::size_t t = 0; t < k; ++t) votes[labels[all[t].second]]++;
  int best = 0, best_count = -1;
  for (const auto& [label, count] : votes)
    if (count > best_count) best = label, best_count = count;
  return best;
}

inline double knn_error(const Grid& train, const std::vector<int>& train_labels, const Grid& test,
                        const std::vector<int>& test_labels, std::size_t k) {
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < test.size(); ++i)
    if (knn_predict(train, train_labels, test[i], k) != test_labels[i]) ++wrong;
  return static_cast<double>(wrong) / static_cast<double>(test.size());
}

inline std::set<std::size_t> knn_set(const Grid& ref, const std::vector<double>& q, std::size_t k, long exclude) {
  std::vector<std::pair<double, std::size_t>> all;
  for (std::size_t j = 0; j < ref.size(); ++j)
    if (static_cast<long>(j) != exclude) all.push_back({sq_dist(ref[j], q), j});
  std::sort(all.begin(), all.end());
  std::set<std::size_t> out;
  for (std::size_t t = 0; t < k; ++t) out.insert(all[t].second);
  return out;
}

inline double quality(const Grid& high, const Grid& low, const Grid& ref_high, const Grid& ref_low, std::size_t k,
                      bool same_collection) {
  double sum = 0;
  for (std::size_t i = 0; i < high.size(); ++i) {
    const long ex = same_collection ? static_cast<long>(i) : -1;
    const auto a = knn_set(ref_high, high[i], k, ex);
    const auto b = knn_set(ref_low, low[i], k, ex);
    std::size_t common = 0;
    for (auto v : a) common += b.count(v);
    sum += static_cast<double>(common) / static_cast<double>(k);
  }
  return sum / static_cast<double>(high.size());
}

inline double wcss(const Grid& x, const Grid& centers) {
  double s = 0;
  for (const auto& p : x) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : centers) best = std::min(best, sq_dist(p, c));
    s += best;
  }
  return s;
}

// Lloyd to convergence from the given centers.
inline Grid lloyd(const Grid& x, Grid centers) {
  for (int it = 0; it < 1000; ++it) {
    Grid sum(centers.size(), std::vector<double>(x[0].size(), 0.0));
    std::vector<std::size_t> count(centers.size(), 0);
    for (const auto& p : x) {
      std::size_t best = 0;
      for (std::size_t c = 1; c < centers.size(); ++c)
        if (sq_dist(p, centers[c]) < sq_dist(p, centers[best])) best = c;
      for (std::size_t d = 0; d < p.size(); ++d) sum[best][d] += p[d];
      ++count[best];
    }
    Grid next = centers;
    for (std::size_t c = 0; c < centers.size(); ++c)
      if (count[c] > 0)
        for (std::size_t d = 0; d < sum[c].size(); ++d) next[c][d] = sum[c][d] / static_cast<double>(count[c]);
    if (next == centers) break;
    centers = std::move(next);
  }
  return centers;
}

// Best WCSS over Lloyd runs from every pair of distinct data points.
inline double best_two_means_wcss(const Grid& x) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < x.size(); ++a)
    for (std::size_t b = a + 1; b < x.size(); ++b) best = std::min(best, wcss(x, lloyd(x, {x[a], x[b]})));
  return best;
}

}  // namespace oracle

#endif  // PTSEE_TESTS_ORACLES_HPP
