#include "ptsee/sweep.hpp"

#include <algorithm>
#include <chrono>

#include "ptsee/evaluation.hpp"

namespace ptsee {

double SweepReport::error_spread() const {
  if (rows.empty()) return 0.0;
  auto [lo, hi] = std::minmax_element(rows.begin(), rows.end(),
                                      [](const SweepRow& a, const SweepRow& b) { return a.test_error < b.test_error; });
  return hi->test_error - lo->test_error;
}

std::pair<std::string, std::vector<std::string>> parse_vary(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == text.size()) {
    throw ParameterError("--vary expects name=v1,v2,..., got '" + text + "'");
  }
  std::pair<std::string, std::vector<std::string>> out;
  out.first = text.substr(0, eq);
  std::string rest = text.substr(eq + 1);
  std::size_t start = 0;
  while (start <= rest.size()) {
    const auto comma = rest.find(',', start);
    const std::string item = rest.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (item.empty()) throw ParameterError("empty value in --vary '" + text + "'");
    out.second.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

SweepReport run_sweep(const TrainConfig& base, const std::string& parameter, const std::vector<std::string>& settings,
                      const Dataset& train_data, const Dataset& test_data, std::size_t k) {
  // Validate every setting before any training starts.
  std::vector<TrainConfig> configs;
  for (const auto& s : settings) {
    TrainConfig cfg = base;
    set_config_field(cfg, parameter, s);
    cfg.validate(static_cast<std::size_t>(train_data.size()));
    configs.push_back(cfg);
  }

  SweepReport report;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    const TrainResult result = train(train_data, configs[i]);
    const auto& model = result.checkpoint.model;
    const EmbeddingResult train_emb = embed(model, train_data);
    const EmbeddingResult test_emb = embed(model, test_data);
    SweepRow row;
    row.parameter = parameter;
    row.setting = settings[i];
    row.k = k;
    row.test_error = knn_error(train_emb, test_emb, k).error_rate;
    if (!result.trace.epoch_loss.empty()) {
      row.first_loss = result.trace.epoch_loss.front();
      row.final_loss = result.trace.epoch_loss.back();
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.rows.push_back(row);
  }
  return report;
}

void write_sweep_csv(const SweepReport& report, const std::filesystem::path& path) {
  std::string out = "parameter,setting,metric,k,split,value,first_loss,final_loss,seconds\n";
  for (const auto& r : report.rows) {
    out += r.parameter + "," + r.setting + "," + metric_name_knn(r.k) + "," + std::to_string(r.k) + ",test," +
           format_double(r.test_error) + "," + format_double(r.first_loss) + "," + format_double(r.final_loss) +
           "," + format_double(r.seconds) + "\n";
  }
  write_file_atomic(path, out);
}

}  // namespace ptsee
