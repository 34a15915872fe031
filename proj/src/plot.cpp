#include <algorithm>
#include <array>
#include <cstdio>
#include <string>

#include "ptsee/dataset.hpp"

namespace ptsee {

namespace {

// Tableau 10.
constexpr std::array<const char*, 10> kPalette = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

constexpr double kCanvas = 800.0;
constexpr double kRadius = 2.5;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

void plot_svg(const EmbeddingResult& result, const std::filesystem::path& path) {
  const DenseMatrix& y = result.coords;
  if (y.cols() != 2) {
    throw UnsupportedDimensionError("plot_svg needs 2-D coordinates, got " + std::to_string(y.cols()));
  }
  if (!y.allFinite()) throw ParameterError("plot_svg: non-finite coordinates");

  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  if (y.rows() > 0) {
    x0 = y.col(0).minCoeff();
    x1 = y.col(0).maxCoeff();
    y0 = y.col(1).minCoeff();
    y1 = y.col(1).maxCoeff();
  }
  // Degenerate extents are padded so the viewport never collapses.
  if (x1 - x0 <= 0.0) { x0 -= 0.5; x1 += 0.5; }
  if (y1 - y0 <= 0.0) { y0 -= 0.5; y1 += 0.5; }
  const double mx = 0.05 * (x1 - x0);
  const double my = 0.05 * (y1 - y0);
  x0 -= mx; x1 += mx;
  y0 -= my; y1 += my;
  const double sx = kCanvas / (x1 - x0);
  const double sy = kCanvas / (y1 - y0);

  std::string svg;
  svg.reserve(static_cast<std::size_t>(y.rows()) * 80 + 512);
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + fmt(kCanvas) +
         "\" height=\"" + fmt(kCanvas) + "\" viewBox=\"0 0 " + fmt(kCanvas) + " " + fmt(kCanvas) + "\">\n";
  svg += "<title>" + escape_xml(result.source_dataset.empty() ? "embedding" : result.source_dataset) +
         "</title>\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + fmt(kCanvas) + "\" height=\"" + fmt(kCanvas) +
         "\" fill=\"white\"/>\n";
  svg += "<g stroke=\"none\" fill-opacity=\"0.8\">\n";
  for (Index i = 0; i < y.rows(); ++i) {
    const double px = (y(i, 0) - x0) * sx;
    const double py = kCanvas - (y(i, 1) - y0) * sy;  // SVG y grows downwards
    const int label = result.labels ? (*result.labels)[static_cast<std::size_t>(i)] : 0;
    const char* color = kPalette[static_cast<std::size_t>(std::max(label, 0)) % kPalette.size()];
    svg += "<circle cx=\"" + fmt(px) + "\" cy=\"" + fmt(py) + "\" r=\"" + fmt(kRadius) +
           "\" fill=\"" + color + "\"/>\n";
  }
  svg += "</g>\n</svg>\n";
  write_file_atomic(path, svg);
}

}  // namespace ptsee
