#include <doctest.h>

#include <regex>
#include <set>

#include "ptsee/dataset.hpp"
#include "support.hpp"

using namespace ptsee;
namespace fs = std::filesystem;

namespace {

std::string be32(std::uint32_t v) {
  return {static_cast<char>(v >> 24), static_cast<char>(v >> 16), static_cast<char>(v >> 8), static_cast<char>(v)};
}

void write_idx_pair(const fs::path& images, const fs::path& labels, std::uint32_t n_images, std::uint32_t n_labels,
                    const std::string& pixels, const std::string& label_bytes,
                    std::uint32_t image_magic = 0x803) {
  testing::write_text(images, be32(image_magic) + be32(n_images) + be32(2) + be32(2) + pixels);
  testing::write_text(labels, be32(0x801) + be32(n_labels) + label_bytes);
}

}  // namespace

TEST_CASE("load_idx reads a hand-written 2x2 fixture") {
  const auto dir = testing::scratch_dir("idx");
  const std::string pixels{"\x00\xff\x80\x01\x10\x20\x30\x40", 8};
  write_idx_pair(dir / "img", dir / "lbl", 2, 2, pixels, std::string{"\x07\x02", 2});
  const Dataset d = load_idx(dir / "img", dir / "lbl");
  CHECK(d.size() == 2);
  CHECK(d.dim() == 4);
  for (Index k = 0; k < 8; ++k) {
    CHECK(d.features.data()[k] == static_cast<unsigned char>(pixels[static_cast<std::size_t>(k)]) / 255.0);
  }
  REQUIRE(d.labels);
  CHECK((*d.labels)[0] == 7);
  CHECK((*d.labels)[1] == 2);
}

TEST_CASE("load_idx rejects bad magic, count mismatch and truncation") {
  const auto dir = testing::scratch_dir("idx-bad");
  const std::string pixels(8, '\x01');
  write_idx_pair(dir / "img", dir / "lbl", 2, 3, pixels, std::string(3, '\x01'));
  CHECK_THROWS_AS(load_idx(dir / "img", dir / "lbl"), FormatError);
  write_idx_pair(dir / "img", dir / "lbl", 2, 2, pixels, std::string(2, '\x01'), 0x802);
  CHECK_THROWS_AS(load_idx(dir / "img", dir / "lbl"), FormatError);
  write_idx_pair(dir / "img", dir / "lbl", 2, 2, pixels.substr(0, 5), std::string(2, '\x01'));
  CHECK_THROWS_AS(load_idx(dir / "img", dir / "lbl"), FormatError);
  CHECK_THROWS_AS(load_idx(dir / "missing", dir / "lbl"), IoError);
}

TEST_CASE("bundled MNIST subset has the expected shape") {
  const fs::path root = fs::path(PTSEE_SOURCE_DIR) / "data" / "mnist-subset";
  const Dataset test = load_idx(root / "t10k-images-idx3-ubyte", root / "t10k-labels-idx1-ubyte");
  CHECK(test.size() == 1000);
  CHECK(test.dim() == 784);
  CHECK(test.num_classes() == 10);
  CHECK(test.features.minCoeff() >= 0.0);
  CHECK(test.features.maxCoeff() <= 1.0);
}

TEST_CASE("load_csv min-max normalizes and reads labels") {
  const auto dir = testing::scratch_dir("csv");
  testing::write_text(dir / "a.csv", "a,b,y\n0,10,0\n5,5,1\n10,0,2\n");
  CsvOptions opts;
  opts.label_column = "y";
  const Dataset d = load_csv(dir / "a.csv", opts);
  CHECK(d.size() == 3);
  CHECK(d.dim() == 2);
  CHECK(d.features(0, 0) == 0.0);
  CHECK(d.features(1, 0) == 0.5);
  CHECK(d.features(2, 0) == 1.0);
  CHECK(d.features(0, 1) == 1.0);
  REQUIRE(d.labels);
  CHECK(*d.labels == std::vector<int>{0, 1, 2});
}

TEST_CASE("load_csv without header, constant column maps to 0") {
  const auto dir = testing::scratch_dir("csv2");
  testing::write_text(dir / "a.csv", "1,3\n2,3\n3,3\n");
  const Dataset d = load_csv(dir / "a.csv");
  CHECK(d.size() == 3);
  CHECK(d.features.col(1).isZero());
  CHECK(d.features(1, 0) == 0.5);
}

TEST_CASE("load_csv errors") {
  const auto dir = testing::scratch_dir("csv3");
  testing::write_text(dir / "ragged.csv", "1,2\n3\n");
  CHECK_THROWS_AS(load_csv(dir / "ragged.csv"), FormatError);
  testing::write_text(dir / "text.csv", "1,2\n3,x\n");
  CHECK_THROWS_AS(load_csv(dir / "text.csv"), FormatError);
  testing::write_text(dir / "nolabel.csv", "a,b\n1,2\n");
  CsvOptions opts;
  opts.label_column = "y";
  CHECK_THROWS_AS(load_csv(dir / "nolabel.csv", opts), FormatError);
}

TEST_CASE("normalization is idempotent") {
  Rng rng(11);
  DenseMatrix x = testing::random_matrix(30, 5, rng, -3, 7);
  normalize_min_max(x);
  DenseMatrix again = x;
  normalize_min_max(again);
  CHECK((again - x).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("write_embedding line format and empty result") {
  const auto dir = testing::scratch_dir("emb");
  EmbeddingResult r;
  r.coords.resize(1, 2);
  r.coords << 0.5, -1.25;
  r.labels = std::vector<int>{3};
  write_embedding(r, dir / "e.csv");
  CHECK(testing::read_text(dir / "e.csv") == "dim0,dim1,label\n0.5,-1.25,3\n");

  EmbeddingResult empty;
  empty.coords.resize(0, 2);
  write_embedding(empty, dir / "empty.csv");
  CHECK(testing::read_text(dir / "empty.csv") == "dim0,dim1\n");
}

TEST_CASE("write_embedding round-trips through the CSV reader") {
  const auto dir = testing::scratch_dir("emb2");
  Rng rng(12);
  EmbeddingResult r;
  r.coords = testing::random_matrix(40, 2, rng, -1e3, 1e3);
  r.labels = std::vector<int>(40);
  for (int i = 0; i < 40; ++i) (*r.labels)[i] = i % 7;
  write_embedding(r, dir / "e.csv");
  const EmbeddingResult back = read_embedding(dir / "e.csv");
  CHECK((back.coords - r.coords).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK(back.labels == r.labels);

  CsvOptions raw;
  raw.label_column = "label";
  raw.normalize = false;
  const Dataset d = load_csv(dir / "e.csv", raw);
  CHECK((d.features - r.coords).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("write_embedding into a missing directory is an io error") {
  EmbeddingResult r;
  r.coords = DenseMatrix::Zero(1, 2);
  CHECK_THROWS_AS(write_embedding(r, "/nonexistent-dir/e.csv"), IoError);
}

TEST_CASE("plot_svg: one circle per point, distinct fills per label") {
  const auto dir = testing::scratch_dir("svg");
  EmbeddingResult r;
  r.coords.resize(2, 2);
  r.coords << 0, 0, 1, 1;
  r.labels = std::vector<int>{0, 1};
  plot_svg(r, dir / "p.svg");
  const std::string svg = testing::read_text(dir / "p.svg");
  CHECK(testing::count_occurrences(svg, "<circle") == 2);
  std::set<std::string> fills;
  const std::regex fill_re("<circle[^>]*fill=\"([^\"]+)\"");
  for (std::sregex_iterator it(svg.begin(), svg.end(), fill_re), end; it != end; ++it) fills.insert((*it)[1]);
  CHECK(fills.size() == 2);
}

TEST_CASE("plot_svg palette cycles after ten classes") {
  const auto dir = testing::scratch_dir("svg-cycle");
  EmbeddingResult r;
  r.coords = DenseMatrix::Zero(12, 2);
  for (Index i = 0; i < 12; ++i) r.coords(i, 0) = static_cast<double>(i);
  r.labels = std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
  plot_svg(r, dir / "p.svg");
  const std::string svg = testing::read_text(dir / "p.svg");
  std::vector<std::string> fills;
  const std::regex fill_re("<circle[^>]*fill=\"([^\"]+)\"");
  for (std::sregex_iterator it(svg.begin(), svg.end(), fill_re), end; it != end; ++it) fills.push_back((*it)[1]);
  REQUIRE(fills.size() == 12);
  CHECK(std::set<std::string>(fills.begin(), fills.begin() + 10).size() == 10);
  CHECK(fills[10] == fills[0]);
  CHECK(fills[11] == fills[1]);
}

TEST_CASE("plot_svg with a degenerate bounding box stays finite") {
  const auto dir = testing::scratch_dir("svg-degenerate");
  EmbeddingResult r;
  r.coords = DenseMatrix::Constant(5, 2, 3.0);
  plot_svg(r, dir / "p.svg");
  const std::string svg = testing::read_text(dir / "p.svg");
  CHECK(testing::count_occurrences(svg, "<circle") == 5);
  CHECK(svg.find("nan") == std::string::npos);
  CHECK(svg.find("inf") == std::string::npos);
}

TEST_CASE("plot_svg rejects non-2D embeddings") {
  EmbeddingResult r;
  r.coords = DenseMatrix::Zero(3, 3);
  CHECK_THROWS_AS(plot_svg(r, "/tmp/ptsee-never-written.svg"), UnsupportedDimensionError);
  CHECK_FALSE(fs::exists("/tmp/ptsee-never-written.svg"));
}

TEST_CASE("data source strings") {
  CHECK_FALSE(validate_data_source("idx:/nope/a,/nope/b").empty());
  CHECK_FALSE(validate_data_source("idx:onlyone").empty());
  CHECK_FALSE(validate_data_source("/nope.csv").empty());
  const fs::path root = fs::path(PTSEE_SOURCE_DIR) / "data" / "mnist-subset";
  const std::string src =
      "idx:" + (root / "t10k-images-idx3-ubyte").string() + "," + (root / "t10k-labels-idx1-ubyte").string();
  CHECK(validate_data_source(src).empty());
  CHECK(load_data_source(src).size() == 1000);
}
