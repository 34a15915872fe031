#include "ptsee/trainer.hpp"

#include <chrono>
#include <cmath>

#include "ptsee/affinity.hpp"
#include "ptsee/loss.hpp"

namespace ptsee {

namespace {

// Sub-seed streams; every stochastic stage draws from its own stream.
enum Stream : std::uint64_t { kExemplarStream = 1, kInitStream = 2, kShuffleStream = 3, kNceStream = 4 };

/// Momentum SGD over the model's parameter blocks.
class MomentumSgd {
 public:
  MomentumSgd(double learning_rate, double momentum, double clip)
      : lr_(learning_rate), mu_(momentum), clip_(clip) {}

  template <class Model>
  void step(Model& model, GradientBundle<double>& grad) {
    auto params = model.blocks();
    if (velocity_.empty()) {
      for (auto& p : params) velocity_.emplace_back(p.size(), 0.0);
    }
    const double norm = std::sqrt(grad.squared_norm());
    const double scale = norm > clip_ ? clip_ / norm : 1.0;
    for (std::size_t k = 0; k < params.size(); ++k) {
      const double* g = grad.blocks[k].data();
      auto& v = velocity_[k];
      for (std::size_t e = 0; e < params[k].size(); ++e) {
        v[e] = mu_ * v[e] - lr_ * scale * g[e];
        params[k][e] += v[e];
      }
    }
  }

 private:
  double lr_;
  double mu_;
  double clip_;
  std::vector<std::vector<double>> velocity_;
};

std::vector<std::vector<std::size_t>> make_batches(const std::vector<std::size_t>& order, std::size_t batch,
                                                   std::size_t min_batch) {
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t start = 0; start < order.size(); start += batch) {
    const std::size_t end = std::min(order.size(), start + batch);
    out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start), order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  // A short tail that cannot carry the objective joins the previous batch.
  if (out.size() > 1 && out.back().size() < min_batch) {
    auto tail = std::move(out.back());
    out.pop_back();
    out.back().insert(out.back().end(), tail.begin(), tail.end());
  }
  return out;
}

template <class Model>
auto forward_cached(const Model& model, const DenseMatrix& x) {
  if constexpr (std::is_same_v<Model, HighOrderNet<double>>) {
    return forward_high_order_cached(model, x);
  } else {
    return forward_ffn_cached(model, x);
  }
}

template <class Cache>
const DenseMatrix& cache_output(const Cache& c) {
  if constexpr (std::is_same_v<Cache, HighOrderCache<double>>) {
    return c.output;
  } else {
    return c.output();
  }
}

template <class Model, class Cache>
GradientBundle<double> backward_cached(const Model& model, const DenseMatrix& x, const Cache& cache,
                                       const DenseMatrix& dy) {
  if constexpr (std::is_same_v<Model, HighOrderNet<double>>) {
    return backward_high_order(model, x, cache, dy);
  } else {
    return backward_ffn(model, x, cache, dy);
  }
}

[[noreturn]] void diverged(std::size_t epoch, std::size_t step, const std::string& what) {
  throw DivergenceError("training diverged at epoch " + std::to_string(epoch + 1) + ", step " +
                        std::to_string(step + 1) + ": non-finite " + what);
}

template <class Model>
void run_training(Model& model, const Dataset& data, const TrainConfig& cfg, TrainResult& result) {
  const auto n = static_cast<std::size_t>(data.size());
  const std::size_t batch = cfg.resolved_batch_size(n);
  const bool exemplar = is_exemplar_method(cfg.method);
  const DenseMatrix& x = data.features;

  // Exemplar methods: exemplars and their affinities are computed once.
  AffinityBlock<double> global_p;
  std::optional<NceNeighborhood> nbhd;
  DenseMatrix ex;
  if (exemplar) {
    result.exemplars = select_exemplars(data, cfg.z, cfg.seeding, cfg.kmeans_iters,
                                        Rng::derive_seed(cfg.seed, kExemplarStream));
    ex = result.exemplars->exemplars;
    global_p = exemplar_affinities(x, ex, cfg.perplexity);
    ++result.trace.affinity_computations;
    if (cfg.z_e) {
      auto [trunc, nb] = truncate_for_nce(global_p, static_cast<Index>(*cfg.z_e), static_cast<Index>(cfg.z_n), cfg.K_e);
      global_p = std::move(trunc);
      nbhd = std::move(nb);
    }
  }

  Rng shuffle_rng(Rng::derive_seed(cfg.seed, kShuffleStream));
  Rng nce_rng(Rng::derive_seed(cfg.seed, kNceStream));
  MomentumSgd opt(cfg.learning_rate, cfg.momentum, cfg.grad_clip);
  const std::size_t min_batch = exemplar ? 1 : static_cast<std::size_t>(std::floor(cfg.perplexity)) + 2;
  const Index z = ex.rows();

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto batches = make_batches(shuffle_rng.permutation(n), batch, std::max<std::size_t>(min_batch, 3));
    double loss_sum = 0.0;
    for (std::size_t s = 0; s < batches.size(); ++s) {
      const auto& rows = batches[s];
      const auto b = static_cast<Index>(rows.size());
      DenseMatrix input(b + z, x.cols());
      for (Index r = 0; r < b; ++r) input.row(r) = x.row(static_cast<Index>(rows[static_cast<std::size_t>(r)]));
      if (z > 0) input.bottomRows(z) = ex;

      const auto cache = forward_cached(model, input);
      const DenseMatrix& y = cache_output(cache);
      DenseMatrix dy(y.rows(), y.cols());
      double value = 0.0;
      try {
        if (exemplar) {
          const auto p = exemplar_rows(global_p, rows);
          LossReport<double> rep;
          if (nbhd) {
            rep = kl_exemplar_nce(p, nbhd->subset(rows), y.topRows(b), y.bottomRows(z), nce_rng);
          } else {
            rep = kl_exemplar(p, exemplar_q(y.topRows(b), y.bottomRows(z)));
          }
          value = rep.value;
          dy.topRows(b) = rep.grad_data;
          dy.bottomRows(z) = rep.grad_exemplars;
        } else {
          const auto p = pairwise_affinities(input, cfg.perplexity);
          ++result.trace.affinity_computations;
          const auto rep = kl_pairwise(p, pairwise_q(y));
          value = rep.value;
          dy = rep.grad_data;
        }
      } catch (const DivergenceInfiniteError&) {
        diverged(epoch, s, "loss");
      }
      if (!std::isfinite(value)) diverged(epoch, s, "loss");

      auto grad = backward_cached(model, input, cache, dy);
      if (!grad.all_finite()) diverged(epoch, s, "gradient");
      opt.step(model, grad);

      loss_sum += value;
      ++result.trace.steps;
      if (epoch + 1 == cfg.epochs && s + 1 == batches.size()) {
        // Final parameters applied to the last batch, forwarded with the exemplars as in training.
        result.last_batch_output = forward(model, input).topRows(b);
        result.last_batch_rows = rows;
      }
    }
    result.trace.epoch_loss.push_back(loss_sum / static_cast<double>(batches.size()));
    result.trace.epoch_seconds.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
}

}  // namespace

EmbeddingModel initial_model(const TrainConfig& cfg, Index input_dim) {
  Rng rng(Rng::derive_seed(cfg.seed, kInitStream));
  const auto out_dim = static_cast<Index>(cfg.output_dim);
  if (uses_high_order(cfg.method)) {
    return HighOrderNet<double>::initialized(input_dim, static_cast<Index>(cfg.factors),
                                             static_cast<Index>(cfg.hidden_units), out_dim, cfg.order, rng);
  }
  std::vector<Index> dims{input_dim};
  for (auto d : cfg.hidden_layers) dims.push_back(static_cast<Index>(d));
  dims.push_back(out_dim);
  return FeedForwardNet<double>::initialized(dims, cfg.activation, rng);
}

TrainResult train(const Dataset& data, const TrainConfig& cfg) {
  if (data.size() < 1 || data.dim() < 1) throw ParameterError("training data is empty");
  if (!data.features.allFinite()) throw ParameterError("training data contains non-finite values");
  cfg.validate(static_cast<std::size_t>(data.size()));

  TrainResult result;
  result.checkpoint.method = to_string(cfg.method);
  result.checkpoint.seed = cfg.seed;
  result.checkpoint.model = initial_model(cfg, data.dim());
  std::visit([&](auto& model) { run_training(model, data, cfg, result); }, result.checkpoint.model);
  return result;
}

EmbeddingResult embed(const EmbeddingModel& model, const Dataset& data, const std::string& model_id) {
  if (data.dim() != input_dim(model)) {
    throw ShapeError("model expects " + std::to_string(input_dim(model)) + " features, data has " +
                     std::to_string(data.dim()));
  }
  EmbeddingResult out;
  out.coords = forward(model, data.features);
  out.labels = data.labels;
  out.source_dataset = data.name;
  out.model_id = model_id.empty() ? model_kind(model) : model_id;
  return out;
}

void write_trace_csv(const TrainTrace& trace, const std::filesystem::path& path) {
  std::string out = "epoch,loss,seconds\n";
  for (std::size_t e = 0; e < trace.epoch_loss.size(); ++e) {
    out += std::to_string(e + 1) + "," + format_double(trace.epoch_loss[e]) + "," +
           format_double(trace.epoch_seconds[e]) + "\n";
  }
  write_file_atomic(path, out);
}

}  // namespace ptsee
