#ifndef PTSEE_MODELS_HPP
#define PTSEE_MODELS_HPP

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "ptsee/core.hpp"
#include "ptsee/rng.hpp"

namespace ptsee {

enum class Activation { relu, logistic, identity };

std::string to_string(Activation a);
Activation parse_activation(const std::string& s);

/// Name and shape of one parameter block.
struct BlockInfo {
  std::string name;
  Index rows = 0;
  Index cols = 0;
};

/// Gradients laid out exactly like the owning model's parameter blocks.
template <class Scalar>
struct GradientBundle {
  std::vector<std::string> names;
  std::vector<Matrix<Scalar>> blocks;

  const Matrix<Scalar>& operator[](const std::string& name) const {
    for (std::size_t k = 0; k < names.size(); ++k) {
      if (names[k] == name) return blocks[k];
    }
    throw ParameterError("no gradient block named " + name);
  }

  Scalar squared_norm() const {
    Scalar s = 0;
    for (const auto& b : blocks) s += b.squaredNorm();
    return s;
  }

  bool all_finite() const {
    for (const auto& b : blocks) {
      if (!b.allFinite()) return false;
    }
    return true;
  }
};

template <class Scalar>
Scalar logistic(Scalar t) {
  return Scalar(1) / (Scalar(1) + std::exp(-t));
}

namespace detail {

template <class Scalar>
Scalar ipow(Scalar x, int p) {
  Scalar r = 1;
  for (int k = 0; k < p; ++k) r *= x;
  return r;
}

template <class Scalar>
Scalar glorot_bound(Index fan_in, Index fan_out) {
  return std::sqrt(Scalar(6) / static_cast<Scalar>(fan_in + fan_out));
}

template <class Scalar>
void fill_uniform(Matrix<Scalar>& m, Scalar bound, Rng& rng) {
  for (Index k = 0; k < m.size(); ++k) {
    m.data()[k] = static_cast<Scalar>((2.0 * rng.uniform() - 1.0)) * bound;
  }
}

template <class Scalar>
std::span<Scalar> span_of(Matrix<Scalar>& m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}

template <class Scalar>
std::span<Scalar> span_of(Vector<Scalar>& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Shallow high-order network
// ---------------------------------------------------------------------------

/// y_s = sum_k V_sk * logistic(sum_f W_fk * (C_f . [x; 1])^order + b_k)
///
/// The trailing 1 appended to every input lets the order-O factor powers
/// cover all feature interactions up to order O.
template <class Scalar>
struct HighOrderNet {
  Matrix<Scalar> C;  // (H+1) x F
  Matrix<Scalar> W;  // F x m
  Vector<Scalar> b;  // m
  Matrix<Scalar> V;  // h x m
  int order = 2;

  Index input_dim() const { return C.rows() - 1; }
  Index factors() const { return C.cols(); }
  Index hidden_units() const { return W.cols(); }
  Index output_dim() const { return V.rows(); }

  static HighOrderNet zeros(Index input_dim, Index factors, Index hidden_units, Index output_dim, int order = 2) {
    if (input_dim < 1 || factors < 1 || hidden_units < 1 || output_dim < 1) {
      throw ParameterError("high-order net dimensions must be positive");
    }
    if (order < 1) throw ParameterError("interaction order must be at least 1");
    HighOrderNet net;
    net.C = Matrix<Scalar>::Zero(input_dim + 1, factors);
    net.W = Matrix<Scalar>::Zero(factors, hidden_units);
    net.b = Vector<Scalar>::Zero(hidden_units);
    net.V = Matrix<Scalar>::Zero(output_dim, hidden_units);
    net.order = order;
    return net;
  }

  /// Glorot-uniform C, W, V; zero b.
  static HighOrderNet initialized(Index input_dim, Index factors, Index hidden_units, Index output_dim, int order,
                                  Rng& rng) {
    HighOrderNet net = zeros(input_dim, factors, hidden_units, output_dim, order);
    detail::fill_uniform(net.C, detail::glorot_bound<Scalar>(input_dim + 1, factors), rng);
    detail::fill_uniform(net.W, detail::glorot_bound<Scalar>(factors, hidden_units), rng);
    detail::fill_uniform(net.V, detail::glorot_bound<Scalar>(hidden_units, output_dim), rng);
    return net;
  }

  std::vector<BlockInfo> block_info() const {
    return {{"C", C.rows(), C.cols()}, {"W", W.rows(), W.cols()}, {"b", b.size(), 1}, {"V", V.rows(), V.cols()}};
  }

  std::vector<std::span<Scalar>> blocks() {
    return {detail::span_of(C), detail::span_of(W), detail::span_of(b), detail::span_of(V)};
  }

  template <class T>
  HighOrderNet<T> cast() const {
    HighOrderNet<T> out;
    out.C = C.template cast<T>();
    out.W = W.template cast<T>();
    out.b = b.template cast<T>();
    out.V = V.template cast<T>();
    out.order = order;
    return out;
  }
};

/// Intermediate activations of a high-order forward pass.
template <class Scalar>
struct HighOrderCache {
  Matrix<Scalar> factors;  // A = [X, 1] C
  Matrix<Scalar> powered;  // A^order
  Matrix<Scalar> hidden;   // logistic(A^order W + b)
  Matrix<Scalar> output;
};

template <class Scalar, class Derived>
HighOrderCache<Scalar> forward_high_order_cached(const HighOrderNet<Scalar>& model,
                                                 const Eigen::MatrixBase<Derived>& x) {
  const Index h_in = model.input_dim();
  if (x.cols() != h_in) {
    throw ShapeError("high-order net expects " + std::to_string(h_in) + " input columns, got " +
                     std::to_string(x.cols()));
  }
  HighOrderCache<Scalar> c;
  c.factors = x * model.C.topRows(h_in);
  c.factors.rowwise() += model.C.row(h_in);
  c.powered = c.factors.unaryExpr([&](Scalar a) { return detail::ipow(a, model.order); });
  c.hidden = c.powered * model.W;
  c.hidden.rowwise() += model.b.transpose();
  c.hidden = c.hidden.unaryExpr([](Scalar s) { return logistic(s); });
  c.output = c.hidden * model.V.transpose();
  return c;
}

template <class Scalar, class Derived>
Matrix<Scalar> forward_high_order(const HighOrderNet<Scalar>& model, const Eigen::MatrixBase<Derived>& x) {
  return forward_high_order_cached(model, x).output;
}

template <class Scalar, class Derived, class DerivedG>
GradientBundle<Scalar> backward_high_order(const HighOrderNet<Scalar>& model, const Eigen::MatrixBase<Derived>& x,
                                           const HighOrderCache<Scalar>& cache,
                                           const Eigen::MatrixBase<DerivedG>& d_output) {
  if (d_output.rows() != x.rows() || d_output.cols() != model.output_dim()) {
    throw ShapeError("output cotangent must be " + shape_string(x.rows(), model.output_dim()));
  }
  const Index h_in = model.input_dim();
  const Matrix<Scalar> dy = d_output;

  Matrix<Scalar> d_v = dy.transpose() * cache.hidden;
  Matrix<Scalar> d_s = dy * model.V;
  d_s.array() *= cache.hidden.array() * (Scalar(1) - cache.hidden.array());
  Vector<Scalar> d_b = d_s.colwise().sum().transpose();
  Matrix<Scalar> d_w = cache.powered.transpose() * d_s;
  Matrix<Scalar> d_a = d_s * model.W.transpose();
  const int o = model.order;
  d_a.array() *= cache.factors.unaryExpr([o](Scalar a) { return static_cast<Scalar>(o) * detail::ipow(a, o - 1); })
                     .array();
  Matrix<Scalar> d_c(h_in + 1, model.factors());
  d_c.topRows(h_in) = x.transpose() * d_a;
  d_c.row(h_in) = d_a.colwise().sum();

  GradientBundle<Scalar> g;
  g.names = {"C", "W", "b", "V"};
  g.blocks = {std::move(d_c), std::move(d_w), Matrix<Scalar>(d_b), std::move(d_v)};
  return g;
}

template <class Scalar, class Derived, class DerivedG>
GradientBundle<Scalar> backward_high_order(const HighOrderNet<Scalar>& model, const Eigen::MatrixBase<Derived>& x,
                                           const Eigen::MatrixBase<DerivedG>& d_output) {
  return backward_high_order(model, x, forward_high_order_cached(model, x), d_output);
}

// ---------------------------------------------------------------------------
// Deep feedforward network
// ---------------------------------------------------------------------------

/// Fully connected net, x W_l + b_l per layer, hidden activation on every
/// layer but the last, which is linear.
template <class Scalar>
struct FeedForwardNet {
  std::vector<Index> layer_dims;  // input, hidden..., output
  std::vector<Matrix<Scalar>> weights;  // layer_dims[l] x layer_dims[l+1]
  std::vector<Vector<Scalar>> biases;
  Activation hidden_activation = Activation::relu;

  Index input_dim() const { return layer_dims.front(); }
  Index output_dim() const { return layer_dims.back(); }
  std::size_t num_layers() const { return weights.size(); }

  static FeedForwardNet zeros(std::vector<Index> dims, Activation act = Activation::relu) {
    if (dims.size() < 2) throw ParameterError("a feedforward net needs input and output dimensions");
    for (auto d : dims) {
      if (d < 1) throw ParameterError("layer dimensions must be positive");
    }
    FeedForwardNet net;
    net.layer_dims = std::move(dims);
    net.hidden_activation = act;
    for (std::size_t l = 0; l + 1 < net.layer_dims.size(); ++l) {
      net.weights.push_back(Matrix<Scalar>::Zero(net.layer_dims[l], net.layer_dims[l + 1]));
      net.biases.push_back(Vector<Scalar>::Zero(net.layer_dims[l + 1]));
    }
    return net;
  }

  static FeedForwardNet initialized(std::vector<Index> dims, Activation act, Rng& rng) {
    FeedForwardNet net = zeros(std::move(dims), act);
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
      detail::fill_uniform(net.weights[l],
                           detail::glorot_bound<Scalar>(net.layer_dims[l], net.layer_dims[l + 1]), rng);
    }
    return net;
  }

  std::vector<BlockInfo> block_info() const {
    std::vector<BlockInfo> out;
    for (std::size_t l = 0; l < weights.size(); ++l) {
      out.push_back({"W" + std::to_string(l), weights[l].rows(), weights[l].cols()});
      out.push_back({"b" + std::to_string(l), biases[l].size(), 1});
    }
    return out;
  }

  std::vector<std::span<Scalar>> blocks() {
    std::vector<std::span<Scalar>> out;
    for (std::size_t l = 0; l < weights.size(); ++l) {
      out.push_back(detail::span_of(weights[l]));
      out.push_back(detail::span_of(biases[l]));
    }
    return out;
  }

  template <class T>
  FeedForwardNet<T> cast() const {
    FeedForwardNet<T> out;
    out.layer_dims = layer_dims;
    out.hidden_activation = hidden_activation;
    for (const auto& w : weights) out.weights.push_back(w.template cast<T>());
    for (const auto& b : biases) out.biases.push_back(b.template cast<T>());
    return out;
  }
};

template <class Scalar>
Scalar activate(Activation act, Scalar t) {
  switch (act) {
    case Activation::relu: return t > Scalar(0) ? t : Scalar(0);
    case Activation::logistic: return logistic(t);
    case Activation::identity: return t;
  }
  return t;
}

/// Derivative expressed through the pre-activation `t` and output `a`.
template <class Scalar>
Scalar activate_grad(Activation act, Scalar t, Scalar a) {
  switch (act) {
    case Activation::relu: return t > Scalar(0) ? Scalar(1) : Scalar(0);
    case Activation::logistic: return a * (Scalar(1) - a);
    case Activation::identity: return Scalar(1);
  }
  return Scalar(1);
}

template <class Scalar>
struct FeedForwardCache {
  std::vector<Matrix<Scalar>> pre;   // per layer
  std::vector<Matrix<Scalar>> post;  // per layer; last == output
  const Matrix<Scalar>& output() const { return post.back(); }
};

template <class Scalar, class Derived>
FeedForwardCache<Scalar> forward_ffn_cached(const FeedForwardNet<Scalar>& model, const Eigen::MatrixBase<Derived>& x) {
  if (x.cols() != model.input_dim()) {
    throw ShapeError("feedforward net expects " + std::to_string(model.input_dim()) + " input columns, got " +
                     std::to_string(x.cols()));
  }
  FeedForwardCache<Scalar> c;
  const std::size_t layers = model.num_layers();
  for (std::size_t l = 0; l < layers; ++l) {
    Matrix<Scalar> z = l == 0 ? Matrix<Scalar>(x * model.weights[0]) : Matrix<Scalar>(c.post.back() * model.weights[l]);
    z.rowwise() += model.biases[l].transpose();
    Matrix<Scalar> a = l + 1 < layers ? Matrix<Scalar>(z.unaryExpr([&](Scalar t) {
      return activate(model.hidden_activation, t);
    }))
                                      : z;
    c.pre.push_back(std::move(z));
    c.post.push_back(std::move(a));
  }
  return c;
}

template <class Scalar, class Derived>
Matrix<Scalar> forward_ffn(const FeedForwardNet<Scalar>& model, const Eigen::MatrixBase<Derived>& x) {
  return forward_ffn_cached(model, x).post.back();
}

template <class Scalar, class Derived, class DerivedG>
GradientBundle<Scalar> backward_ffn(const FeedForwardNet<Scalar>& model, const Eigen::MatrixBase<Derived>& x,
                                    const FeedForwardCache<Scalar>& cache, const Eigen::MatrixBase<DerivedG>& d_output) {
  if (d_output.rows() != x.rows() || d_output.cols() != model.output_dim()) {
    throw ShapeError("output cotangent must be " + shape_string(x.rows(), model.output_dim()));
  }
  const std::size_t layers = model.num_layers();
  std::vector<Matrix<Scalar>> d_w(layers);
  std::vector<Vector<Scalar>> d_b(layers);
  Matrix<Scalar> d_z = d_output;
  for (std::size_t l = layers; l-- > 0;) {
    d_w[l] = l == 0 ? Matrix<Scalar>(x.transpose() * d_z) : Matrix<Scalar>(cache.post[l - 1].transpose() * d_z);
    d_b[l] = d_z.colwise().sum().transpose();
    if (l == 0) break;
    Matrix<Scalar> d_a = d_z * model.weights[l].transpose();
    const auto& pre = cache.pre[l - 1];
    const auto& post = cache.post[l - 1];
    for (Index k = 0; k < d_a.size(); ++k) {
      d_a.data()[k] *= activate_grad(model.hidden_activation, pre.data()[k], post.data()[k]);
    }
    d_z = std::move(d_a);
  }
  GradientBundle<Scalar> g;
  for (std::size_t l = 0; l < layers; ++l) {
    g.names.push_back("W" + std::to_string(l));
    g.blocks.push_back(std::move(d_w[l]));
    g.names.push_back("b" + std::to_string(l));
    g.blocks.push_back(Matrix<Scalar>(d_b[l]));
  }
  return g;
}

template <class Scalar, class Derived, class DerivedG>
GradientBundle<Scalar> backward_ffn(const FeedForwardNet<Scalar>& model, const Eigen::MatrixBase<Derived>& x,
                                    const Eigen::MatrixBase<DerivedG>& d_output) {
  return backward_ffn(model, x, forward_ffn_cached(model, x), d_output);
}

// Uniform entry points so generic code can take either model.

template <class Scalar, class Derived>
Matrix<Scalar> forward(const HighOrderNet<Scalar>& m, const Eigen::MatrixBase<Derived>& x) {
  return forward_high_order(m, x);
}
template <class Scalar, class Derived>
Matrix<Scalar> forward(const FeedForwardNet<Scalar>& m, const Eigen::MatrixBase<Derived>& x) {
  return forward_ffn(m, x);
}
template <class Scalar, class Derived, class DerivedG>
GradientBundle<Scalar> backward(const HighOrderNet<Scalar>& m, const Eigen::MatrixBase<Derived>& x,
                                const Eigen::MatrixBase<DerivedG>& dy) {
  return backward_high_order(m, x, dy);
}
template <class Scalar, class Derived, class DerivedG>
GradientBundle<Scalar> backward(const FeedForwardNet<Scalar>& m, const Eigen::MatrixBase<Derived>& x,
                                const Eigen::MatrixBase<DerivedG>& dy) {
  return backward_ffn(m, x, dy);
}

}  // namespace ptsee

#endif  // PTSEE_MODELS_HPP
