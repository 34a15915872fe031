#ifndef PTSEE_CHECKPOINT_HPP
#define PTSEE_CHECKPOINT_HPP

#include <concepts>
#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>

#include "ptsee/models.hpp"

namespace ptsee {

using EmbeddingModel = std::variant<HighOrderNet<double>, FeedForwardNet<double>>;

DenseMatrix forward_variant(const EmbeddingModel& model, const DenseMatrix& x);

/// Exact-type overload; a plain parameter would compete with the per-model
/// templates through the variant's converting constructor.
template <class M>
  requires std::same_as<M, EmbeddingModel>
DenseMatrix forward(const M& model, const DenseMatrix& x) {
  return forward_variant(model, x);
}
Index input_dim(const EmbeddingModel& model);
Index output_dim(const EmbeddingModel& model);
std::string model_kind(const EmbeddingModel& model);

struct Checkpoint {
  EmbeddingModel model;
  std::string method;
  std::uint64_t seed = 0;
};

/// One JSON header line describing the model and the order of its parameter
/// blocks, then every block as little-endian IEEE-754 doubles, row-major.
std::string serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint parse_checkpoint(const std::string& bytes);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace ptsee

#endif  // PTSEE_CHECKPOINT_HPP
