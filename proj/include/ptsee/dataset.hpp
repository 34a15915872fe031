#ifndef PTSEE_DATASET_HPP
#define PTSEE_DATASET_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ptsee/core.hpp"

namespace ptsee {

/// Feature matrix (one observation per row) with optional integer labels.
struct Dataset {
  DenseMatrix features;
  std::optional<std::vector<int>> labels;
  std::string name;

  Index size() const { return features.rows(); }
  Index dim() const { return features.cols(); }
  int num_classes() const;

  /// Rows selected by `indices`, labels carried along.
  Dataset subset(const std::vector<std::size_t>& indices) const;
  Dataset head(Index count) const;
};

/// Low-dimensional coordinates produced by a model.
struct EmbeddingResult {
  DenseMatrix coords;
  std::optional<std::vector<int>> labels;
  std::string source_dataset;
  std::string model_id;
};

/// Loads an image/label pair of IDX files (MNIST layout). Pixels are scaled
/// by 1/255.
Dataset load_idx(const std::filesystem::path& images_path,
                 const std::filesystem::path& labels_path);

struct CsvOptions {
  /// Header name of the integer label column, if any.
  std::optional<std::string> label_column;
  /// Per-feature min-max scaling to [0, 1].
  bool normalize = true;
};

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});

/// Per-column min-max scaling to [0, 1]; constant columns become 0.
void normalize_min_max(DenseMatrix& features);

/// Parses a data source string: "idx:IMAGES,LABELS" or a CSV path.
Dataset load_data_source(const std::string& source,
                         const std::optional<std::string>& label_column = std::nullopt);

/// Checks a data source string names existing files; returns an error
/// message or an empty string.
std::string validate_data_source(const std::string& source);

/// CSV with header "dim0,dim1,...[,label]".
void write_embedding(const EmbeddingResult& result, const std::filesystem::path& path);

EmbeddingResult read_embedding(const std::filesystem::path& path);

/// Plain numeric CSV, one matrix row per line, with a "dim0,...,dimK" header.
void write_matrix_csv(const DenseMatrix& m, const std::filesystem::path& path);

/// Labeled SVG 1.1 scatter plot of a 2-D embedding.
void plot_svg(const EmbeddingResult& result, const std::filesystem::path& path);

/// Writes `contents` to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// Shortest decimal representation that round-trips exactly.
std::string format_double(double v);

}  // namespace ptsee

#endif  // PTSEE_DATASET_HPP
