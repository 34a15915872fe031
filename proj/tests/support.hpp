#ifndef PTSEE_TESTS_SUPPORT_HPP
#define PTSEE_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "ptsee/affinity.hpp"
#include "ptsee/core.hpp"
#include "ptsee/gradcheck.hpp"
#include "ptsee/loss.hpp"
#include "ptsee/models.hpp"
#include "ptsee/rng.hpp"

namespace testing {

using ptsee::DenseMatrix;
using ptsee::Index;
using ptsee::Rng;

inline DenseMatrix random_matrix(Index rows, Index cols, Rng& rng, double lo = -1.0, double hi = 1.0) {
  DenseMatrix m(rows, cols);
  for (Index k = 0; k < m.size(); ++k) m.data()[k] = lo + (hi - lo) * rng.uniform();
  return m;
}

inline Index random_between(Rng& rng, Index lo, Index hi) {
  return lo + static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(hi - lo + 1)));
}

template <class M>
oracle::Grid to_grid(const M& m) {
  oracle::Grid g(static_cast<std::size_t>(m.rows()), std::vector<double>(static_cast<std::size_t>(m.cols())));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) g[i][j] = static_cast<double>(m(i, j));
  return g;
}

inline std::vector<double> to_vec(const ptsee::DenseVector& v) { return {v.data(), v.data() + v.size()}; }

template <class M>
double max_abs_diff(const M& a, const oracle::Grid& b) {
  double worst = 0;
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) worst = std::max(worst, std::abs(static_cast<double>(a(i, j)) - b[i][j]));
  return worst;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("ptsee-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

inline std::size_t count_occurrences(const std::string& s, const std::string& needle) {
  std::size_t count = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++count;
  return count;
}

enum class Objective { pt_sne, hot_sne, dt_see, hot_see };

inline const char* objective_name(Objective o) {
  switch (o) {
    case Objective::pt_sne: return "pt-SNE";
    case Objective::hot_sne: return "hot-SNE";
    case Objective::dt_see: return "dt-SEE";
    case Objective::hot_see: return "hot-SEE";
  }
  return "?";
}

inline ptsee::GradCheckReport check_objective_model(const auto& model, const DenseMatrix& x, const DenseMatrix& e,
                                                    bool exemplar, double u) {
  using ptsee::Matrix;
  if (!exemplar) {
    const auto p = ptsee::pairwise_affinities(x, u);
    const auto pw = p.template cast<long double>();
    return ptsee::grad_check(model, x, [&](const auto& y) {
      using S = typename std::decay_t<decltype(y)>::Scalar;
      const auto& ps = [&]() -> const auto& {
        if constexpr (std::is_same_v<S, double>) return p;
        else return pw;
      }();
      const auto r = ptsee::kl_pairwise(ps, ptsee::pairwise_q(y));
      return std::pair<S, Matrix<S>>{r.value, r.grad_data};
    });
  }
  const auto p = ptsee::exemplar_affinities(x, e, u);
  const auto pw = p.template cast<long double>();
  DenseMatrix stacked(x.rows() + e.rows(), x.cols());
  stacked << x, e;
  const Index n = x.rows();
  const Index z = e.rows();
  return ptsee::grad_check(model, stacked, [&](const auto& y) {
    using S = typename std::decay_t<decltype(y)>::Scalar;
    const auto& ps = [&]() -> const auto& {
      if constexpr (std::is_same_v<S, double>) return p;
      else return pw;
    }();
    const auto r = ptsee::kl_exemplar(ps, ptsee::exemplar_q(y.topRows(n), y.bottomRows(z)));
    Matrix<S> dy(n + z, y.cols());
    dy << r.grad_data, r.grad_exemplars;
    return std::pair<S, Matrix<S>>{r.value, dy};
  });
}

/// Full objective gradient check on one randomized small instance:
/// n <= 20, z <= 6, H <= 12, F <= 8, m <= 6, h = 2.
inline ptsee::GradCheckReport objective_grad_check(Objective objective, std::uint64_t seed) {
  Rng rng(seed);
  const bool exemplar = objective == Objective::dt_see || objective == Objective::hot_see;
  const bool high_order = objective == Objective::hot_sne || objective == Objective::hot_see;
  const Index n = random_between(rng, exemplar ? 2 : 6, 20);
  const Index z = random_between(rng, 3, 6);
  const Index H = random_between(rng, 2, 12);
  const DenseMatrix x = random_matrix(n, H, rng, 0.0, 1.0);
  const DenseMatrix e = random_matrix(z, H, rng, 0.0, 1.0);
  const double upper = exemplar ? static_cast<double>(z) : static_cast<double>(n - 1);
  const double u = 1.5 + (upper - 2.0) * rng.uniform();
  if (high_order) {
    const Index F = random_between(rng, 1, 8);
    const Index m = random_between(rng, 1, 6);
    const int order = static_cast<int>(random_between(rng, 1, 3));
    const auto model = ptsee::HighOrderNet<double>::initialized(H, F, m, 2, order, rng);
    return check_objective_model(model, x, e, exemplar, u);
  }
  const auto act = (seed % 2 == 0) ? ptsee::Activation::logistic : ptsee::Activation::relu;
  std::vector<Index> dims{H};
  const Index depth = random_between(rng, 1, 3);
  for (Index l = 0; l < depth; ++l) dims.push_back(random_between(rng, 2, 8));
  dims.push_back(2);
  auto model = ptsee::FeedForwardNet<double>::initialized(dims, act, rng);
  for (auto& b : model.biases) b = random_matrix(b.size(), 1, rng, -0.5, 0.5);
  return check_objective_model(model, x, e, exemplar, u);
}

}  // namespace testing

#endif  // PTSEE_TESTS_SUPPORT_HPP
