#ifndef PTSEE_TRAINER_HPP
#define PTSEE_TRAINER_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ptsee/checkpoint.hpp"
#include "ptsee/dataset.hpp"
#include "ptsee/exemplars.hpp"

namespace ptsee {

/// pt-SNE and hot-SNE compare points pairwise inside each batch; dt-SEE and
/// hot-SEE compare every point with a fixed exemplar set. The "dt"/"pt"
/// variants use the deep feedforward net, "hot" the high-order net.
enum class Method { pt_sne, hot_sne, dt_see, hot_see };

std::string to_string(Method m);
Method parse_method(const std::string& s);
bool is_exemplar_method(Method m);
bool uses_high_order(Method m);

struct TrainConfig {
  Method method = Method::hot_see;
  double perplexity = 3.0;
  /// Unset: 100 when z < 1000, otherwise 1000 (capped at n).
  std::optional<std::size_t> batch_size;
  std::size_t epochs = 100;
  std::size_t z = 2000;
  /// NCE is enabled when z_e is set.
  std::optional<std::size_t> z_e;
  std::size_t z_n = 0;
  /// Unset: (z - z_e) / z_n.
  std::optional<double> K_e;
  double learning_rate = 0.05;
  double momentum = 0.9;
  std::uint64_t seed = 0;

  std::size_t factors = 800;       // F
  std::size_t hidden_units = 400;  // m
  int order = 2;                   // O
  std::vector<std::size_t> hidden_layers = {500, 500, 2000};
  Activation activation = Activation::relu;
  std::size_t output_dim = 2;

  Seeding seeding = Seeding::careful;
  std::size_t kmeans_iters = 10;
  double grad_clip = 1e3;

  // Data sources, used by the command line tool.
  std::string data;
  std::string test_data;
  std::optional<std::string> label_column;
  std::size_t train_rows = 0;  // 0 = all
  std::size_t test_rows = 0;

  std::size_t resolved_batch_size(std::size_t n) const;
  /// Throws ParameterError when the configuration cannot train on n rows.
  void validate(std::size_t n) const;
};

TrainConfig config_from_json(const nlohmann::json& j, TrainConfig base = {});
nlohmann::json config_to_json(const TrainConfig& cfg);
TrainConfig load_config(const std::filesystem::path& path);
/// Sets one field from its JSON name and a textual value.
void set_config_field(TrainConfig& cfg, const std::string& name, const std::string& value);

struct TrainTrace {
  std::vector<double> epoch_loss;
  std::vector<double> epoch_seconds;
  std::size_t steps = 0;
  /// Number of high-dimensional affinity evaluations (global or per batch).
  std::size_t affinity_computations = 0;
  std::string checkpoint_path;
};

void write_trace_csv(const TrainTrace& trace, const std::filesystem::path& path);

struct TrainResult {
  Checkpoint checkpoint;
  TrainTrace trace;
  std::optional<ExemplarSet> exemplars;
  /// Final-parameter outputs for the last batch, data rows only.
  DenseMatrix last_batch_output;
  std::vector<std::size_t> last_batch_rows;
};

/// Initial model for a configuration, before any update.
EmbeddingModel initial_model(const TrainConfig& cfg, Index input_dim);

TrainResult train(const Dataset& data, const TrainConfig& cfg);

/// Pure forward pass of every row; no affinities, no optimization.
EmbeddingResult embed(const EmbeddingModel& model, const Dataset& data, const std::string& model_id = {});

}  // namespace ptsee

#endif  // PTSEE_TRAINER_HPP
