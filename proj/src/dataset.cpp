#include "ptsee/dataset.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

namespace ptsee {

namespace fs = std::filesystem;

int Dataset::num_classes() const {
  if (!labels || labels->empty()) return 0;
  return *std::max_element(labels->begin(), labels->end()) + 1;
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  Dataset out;
  out.name = name;
  out.features = gather_rows(features, indices);
  if (labels) {
    std::vector<int> l;
    l.reserve(indices.size());
    for (auto i : indices) l.push_back((*labels)[i]);
    out.labels = std::move(l);
  }
  return out;
}

Dataset Dataset::head(Index count) const {
  count = std::min(count, size());
  std::vector<std::size_t> idx(static_cast<std::size_t>(count));
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  return subset(idx);
}

namespace {

std::string read_binary(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::uint32_t read_be32(const std::string& bytes, std::size_t offset, const fs::path& path) {
  if (offset + 4 > bytes.size()) throw FormatError("truncated IDX header in " + path.string());
  std::uint32_t v = 0;
  for (std::size_t k = 0; k < 4; ++k) {
    v = (v << 8) | static_cast<unsigned char>(bytes[offset + k]);
  }
  return v;
}

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

bool parse_double(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char* first = t.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size();
}

}  // namespace

Dataset load_idx(const fs::path& images_path, const fs::path& labels_path) {
  const std::string img = read_binary(images_path);
  const std::string lab = read_binary(labels_path);

  if (read_be32(img, 0, images_path) != kImagesMagic) {
    throw FormatError("bad IDX image magic in " + images_path.string());
  }
  if (read_be32(lab, 0, labels_path) != kLabelsMagic) {
    throw FormatError("bad IDX label magic in " + labels_path.string());
  }
  const std::size_t count = read_be32(img, 4, images_path);
  const std::size_t rows = read_be32(img, 8, images_path);
  const std::size_t cols = read_be32(img, 12, images_path);
  const std::size_t label_count = read_be32(lab, 4, labels_path);
  if (count != label_count) {
    throw FormatError("IDX count mismatch: " + std::to_string(count) + " images, " +
                      std::to_string(label_count) + " labels");
  }
  const std::size_t dim = rows * cols;
  if (img.size() < 16 + count * dim) throw FormatError("truncated IDX images " + images_path.string());
  if (lab.size() < 8 + count) throw FormatError("truncated IDX labels " + labels_path.string());

  Dataset ds;
  ds.name = images_path.filename().string();
  ds.features.resize(static_cast<Index>(count), static_cast<Index>(dim));
  const auto* px = reinterpret_cast<const unsigned char*>(img.data() + 16);
  double* dst = ds.features.data();
  for (std::size_t k = 0; k < count * dim; ++k) dst[k] = px[k] / 255.0;

  std::vector<int> labels(count);
  for (std::size_t i = 0; i < count; ++i) labels[i] = static_cast<unsigned char>(lab[8 + i]);
  ds.labels = std::move(labels);
  return ds;
}

void normalize_min_max(DenseMatrix& features) {
  for (Index c = 0; c < features.cols(); ++c) {
    auto col = features.col(c);
    if (col.size() == 0) continue;
    const double lo = col.minCoeff();
    const double hi = col.maxCoeff();
    if (hi > lo) {
      col = (col.array() - lo) / (hi - lo);
    } else {
      col.setZero();
    }
  }
}

Dataset load_csv(const fs::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());

  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    rows.push_back(split_csv_line(line));
  }

  std::vector<std::string> header;
  if (!rows.empty()) {
    double dummy = 0.0;
    const bool numeric = std::all_of(rows.front().begin(), rows.front().end(),
                                     [&](const std::string& c) { return parse_double(c, dummy); });
    if (!numeric) {
      for (auto& c : rows.front()) header.push_back(trim(c));
      rows.erase(rows.begin());
    }
  }

  std::optional<std::size_t> label_col;
  if (options.label_column) {
    auto it = std::find(header.begin(), header.end(), *options.label_column);
    if (it == header.end()) {
      throw FormatError("label column '" + *options.label_column + "' not found in " + path.string());
    }
    label_col = static_cast<std::size_t>(it - header.begin());
  }

  const std::size_t width = !header.empty() ? header.size() : (rows.empty() ? 0 : rows.front().size());
  const std::size_t feature_cols = width - (label_col ? 1 : 0);

  Dataset ds;
  ds.name = path.filename().string();
  ds.features.resize(static_cast<Index>(rows.size()), static_cast<Index>(feature_cols));
  std::vector<int> labels;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& cells = rows[r];
    if (cells.size() != width) {
      throw FormatError(path.string() + ": row " + std::to_string(r + 1) + " has " +
                        std::to_string(cells.size()) + " cells, expected " + std::to_string(width));
    }
    Index c_out = 0;
    for (std::size_t c = 0; c < width; ++c) {
      double v = 0.0;
      if (!parse_double(cells[c], v) || !std::isfinite(v)) {
        throw FormatError(path.string() + ": non-numeric cell '" + cells[c] + "' in row " +
                          std::to_string(r + 1));
      }
      if (label_col && c == *label_col) {
        if (v != std::floor(v) || v < 0) {
          throw FormatError(path.string() + ": label '" + cells[c] + "' is not a non-negative integer");
        }
        labels.push_back(static_cast<int>(v));
      } else {
        ds.features(static_cast<Index>(r), c_out++) = v;
      }
    }
  }
  if (label_col) ds.labels = std::move(labels);
  if (options.normalize) normalize_min_max(ds.features);
  return ds;
}

Dataset load_data_source(const std::string& source, const std::optional<std::string>& label_column) {
  if (source.rfind("idx:", 0) == 0) {
    const std::string rest = source.substr(4);
    const auto comma = rest.find(',');
    if (comma == std::string::npos) {
      throw FormatError("idx data source needs 'idx:IMAGES,LABELS', got '" + source + "'");
    }
    return load_idx(rest.substr(0, comma), rest.substr(comma + 1));
  }
  CsvOptions opts;
  opts.label_column = label_column;
  return load_csv(source, opts);
}

std::string validate_data_source(const std::string& source) {
  if (source.rfind("idx:", 0) == 0) {
    const std::string rest = source.substr(4);
    const auto comma = rest.find(',');
    if (comma == std::string::npos) return "idx data source needs 'idx:IMAGES,LABELS'";
    for (const auto& p : {rest.substr(0, comma), rest.substr(comma + 1)}) {
      if (!fs::is_regular_file(p)) return "file not found: " + p;
    }
    return {};
  }
  if (!fs::is_regular_file(source)) return "file not found: " + source;
  return {};
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

void write_file_atomic(const fs::path& path, const std::string& contents) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename into " + path.string());
  }
}

void write_embedding(const EmbeddingResult& result, const fs::path& path) {
  const DenseMatrix& y = result.coords;
  if (!y.allFinite()) throw ParameterError("write_embedding: non-finite coordinates");
  if (result.labels && static_cast<Index>(result.labels->size()) != y.rows()) {
    throw ShapeError("write_embedding: label count does not match rows");
  }
  std::string out;
  for (Index c = 0; c < y.cols(); ++c) {
    if (c) out += ',';
    out += "dim" + std::to_string(c);
  }
  if (result.labels) out += y.cols() ? ",label" : "label";
  out += '\n';
  for (Index r = 0; r < y.rows(); ++r) {
    for (Index c = 0; c < y.cols(); ++c) {
      if (c) out += ',';
      out += format_double(y(r, c));
    }
    if (result.labels) out += "," + std::to_string((*result.labels)[static_cast<std::size_t>(r)]);
    out += '\n';
  }
  write_file_atomic(path, out);
}

EmbeddingResult read_embedding(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string first;
  std::getline(in, first);
  const bool labeled = first.find("label") != std::string::npos;
  CsvOptions opts;
  opts.normalize = false;
  if (labeled) opts.label_column = "label";
  Dataset ds = load_csv(path, opts);
  EmbeddingResult r;
  r.coords = std::move(ds.features);
  r.labels = std::move(ds.labels);
  r.source_dataset = path.filename().string();
  return r;
}

void write_matrix_csv(const DenseMatrix& m, const fs::path& path) {
  EmbeddingResult r;
  r.coords = m;
  write_embedding(r, path);
}

}  // namespace ptsee
