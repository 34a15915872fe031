#ifndef PTSEE_SWEEP_HPP
#define PTSEE_SWEEP_HPP

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "ptsee/dataset.hpp"
#include "ptsee/trainer.hpp"

namespace ptsee {

/// One trained setting of a one-knob sensitivity sweep.
struct SweepRow {
  std::string parameter;
  std::string setting;
  std::size_t k = 1;
  double test_error = 0.0;
  double first_loss = 0.0;
  double final_loss = 0.0;
  double seconds = 0.0;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  /// max - min test error over the settings.
  double error_spread() const;
};

/// Parses "name=v1,v2,..".
std::pair<std::string, std::vector<std::string>> parse_vary(const std::string& text);

/// Trains once per setting (sequentially), embeds the test split and
/// records its kNN error.
SweepReport run_sweep(const TrainConfig& base, const std::string& parameter, const std::vector<std::string>& settings,
                      const Dataset& train_data, const Dataset& test_data, std::size_t k = 1);

/// CSV "parameter,setting,metric,k,split,value,first_loss,final_loss,seconds".
void write_sweep_csv(const SweepReport& report, const std::filesystem::path& path);

}  // namespace ptsee

#endif  // PTSEE_SWEEP_HPP
