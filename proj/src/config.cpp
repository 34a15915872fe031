#include <fstream>

#include <nlohmann/json.hpp>

#include "ptsee/trainer.hpp"

namespace ptsee {

using json = nlohmann::json;

std::string to_string(Method m) {
  switch (m) {
    case Method::pt_sne: return "pt-sne";
    case Method::hot_sne: return "hot-sne";
    case Method::dt_see: return "dt-see";
    case Method::hot_see: return "hot-see";
  }
  return "hot-see";
}

Method parse_method(const std::string& s) {
  if (s == "pt-sne") return Method::pt_sne;
  if (s == "hot-sne") return Method::hot_sne;
  if (s == "dt-see") return Method::dt_see;
  if (s == "hot-see") return Method::hot_see;
  throw ParameterError("unknown method '" + s + "' (pt-sne, hot-sne, dt-see, hot-see)");
}

bool is_exemplar_method(Method m) { return m == Method::dt_see || m == Method::hot_see; }
bool uses_high_order(Method m) { return m == Method::hot_sne || m == Method::hot_see; }

std::size_t TrainConfig::resolved_batch_size(std::size_t n) const {
  if (batch_size) return *batch_size;
  const std::size_t def = is_exemplar_method(method) && z < 1000 ? 100 : 1000;
  return std::min(def, n);
}

void TrainConfig::validate(std::size_t n) const {
  const std::size_t b = resolved_batch_size(n);
  if (b < 1) throw ParameterError("batch_size must be at least 1");
  if (b > n) {
    throw ParameterError("batch_size " + std::to_string(b) + " exceeds the " + std::to_string(n) + " training rows");
  }
  if (!(learning_rate > 0)) throw ParameterError("learning_rate must be positive");
  if (!(momentum >= 0 && momentum < 1)) throw ParameterError("momentum must lie in [0, 1)");
  if (output_dim < 1) throw ParameterError("output_dim must be positive");
  if (order < 1) throw ParameterError("order must be at least 1");
  if (factors < 1 || hidden_units < 1) throw ParameterError("F and m must be positive");
  if (!(grad_clip > 0)) throw ParameterError("grad_clip must be positive");
  if (is_exemplar_method(method)) {
    if (z < 2 || z > n) {
      throw ParameterError("z must lie in [2, n] = [2, " + std::to_string(n) + "], got " + std::to_string(z));
    }
    if (!(perplexity > 1 && perplexity < static_cast<double>(z))) {
      throw ParameterError("perplexity must lie in (1, z) for exemplar methods");
    }
    if (z_e) {
      if (*z_e < 1 || *z_e >= z) throw ParameterError("z_e must lie in [1, z)");
      if (*z_e + z_n > z) throw ParameterError("z_e + z_n must not exceed z");
      if (K_e && *K_e < 0) throw ParameterError("K_e must be non-negative");
    }
  } else {
    if (!(perplexity > 1 && perplexity < static_cast<double>(b) - 1)) {
      throw ParameterError("perplexity must lie in (1, batch_size - 1) for pairwise methods");
    }
  }
}

TrainConfig config_from_json(const json& j, TrainConfig cfg) {
  if (!j.is_object()) throw FormatError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "method") cfg.method = parse_method(value.get<std::string>());
      else if (key == "perplexity") cfg.perplexity = value.get<double>();
      else if (key == "batch_size") {
        if (value.is_null()) cfg.batch_size.reset();
        else cfg.batch_size = value.get<std::size_t>();
      }
      else if (key == "epochs") cfg.epochs = value.get<std::size_t>();
      else if (key == "z") cfg.z = value.get<std::size_t>();
      else if (key == "z_e") {
        if (value.is_null()) cfg.z_e.reset();
        else cfg.z_e = value.get<std::size_t>();
      }
      else if (key == "z_n") cfg.z_n = value.get<std::size_t>();
      else if (key == "K_e") {
        if (value.is_null()) cfg.K_e.reset();
        else cfg.K_e = value.get<double>();
      }
      else if (key == "learning_rate") cfg.learning_rate = value.get<double>();
      else if (key == "momentum") cfg.momentum = value.get<double>();
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "F") cfg.factors = value.get<std::size_t>();
      else if (key == "m") cfg.hidden_units = value.get<std::size_t>();
      else if (key == "O") cfg.order = value.get<int>();
      else if (key == "hidden_layers") cfg.hidden_layers = value.get<std::vector<std::size_t>>();
      else if (key == "activation") cfg.activation = parse_activation(value.get<std::string>());
      else if (key == "output_dim") cfg.output_dim = value.get<std::size_t>();
      else if (key == "seeding") cfg.seeding = parse_seeding(value.get<std::string>());
      else if (key == "kmeans_iters") cfg.kmeans_iters = value.get<std::size_t>();
      else if (key == "grad_clip") cfg.grad_clip = value.get<double>();
      else if (key == "data") cfg.data = value.get<std::string>();
      else if (key == "test_data") cfg.test_data = value.get<std::string>();
      else if (key == "label_column") {
        if (value.is_null()) cfg.label_column.reset();
        else cfg.label_column = value.get<std::string>();
      }
      else if (key == "train_rows") cfg.train_rows = value.get<std::size_t>();
      else if (key == "test_rows") cfg.test_rows = value.get<std::size_t>();
      else throw FormatError("unknown config field '" + key + "'");
    } catch (const json::exception& e) {
      throw FormatError("config field '" + key + "': " + e.what());
    }
  }
  return cfg;
}

json config_to_json(const TrainConfig& cfg) {
  json j;
  j["method"] = to_string(cfg.method);
  j["perplexity"] = cfg.perplexity;
  j["batch_size"] = cfg.batch_size ? json(*cfg.batch_size) : json(nullptr);
  j["epochs"] = cfg.epochs;
  j["z"] = cfg.z;
  j["z_e"] = cfg.z_e ? json(*cfg.z_e) : json(nullptr);
  j["z_n"] = cfg.z_n;
  j["K_e"] = cfg.K_e ? json(*cfg.K_e) : json(nullptr);
  j["learning_rate"] = cfg.learning_rate;
  j["momentum"] = cfg.momentum;
  j["seed"] = cfg.seed;
  j["F"] = cfg.factors;
  j["m"] = cfg.hidden_units;
  j["O"] = cfg.order;
  j["hidden_layers"] = cfg.hidden_layers;
  j["activation"] = to_string(cfg.activation);
  j["output_dim"] = cfg.output_dim;
  j["seeding"] = to_string(cfg.seeding);
  j["kmeans_iters"] = cfg.kmeans_iters;
  j["grad_clip"] = cfg.grad_clip;
  j["data"] = cfg.data;
  j["test_data"] = cfg.test_data;
  j["label_column"] = cfg.label_column ? json(*cfg.label_column) : json(nullptr);
  j["train_rows"] = cfg.train_rows;
  j["test_rows"] = cfg.test_rows;
  return j;
}

TrainConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

void set_config_field(TrainConfig& cfg, const std::string& name, const std::string& value) {
  json v;
  try {
    v = json::parse(value);
  } catch (const json::exception&) {
    v = value;  // bare strings such as method names
  }
  cfg = config_from_json(json{{name, v}}, cfg);
}

}  // namespace ptsee
