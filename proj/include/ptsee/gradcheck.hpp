#ifndef PTSEE_GRADCHECK_HPP
#define PTSEE_GRADCHECK_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "ptsee/models.hpp"

namespace ptsee {

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_block;
  Index worst_entry = -1;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t entries_checked = 0;
};

/// |a - n| / max(1e-8, |a| + |n|)
inline double gradient_relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max(1e-8, std::abs(analytic) + std::abs(numeric));
}

/// Compares an analytic gradient against central differences of
/// `loss_of_model` over every parameter entry.
///
/// `loss_of_model` must be generic in the model's scalar type: the
/// differences are taken in long double so that rounding in the loss does not
/// swamp the O(step^2) truncation error.
template <template <class> class Model, class LossOfModel>
GradCheckReport grad_check(const Model<double>& model, const GradientBundle<double>& analytic,
                           LossOfModel&& loss_of_model, double step = 1e-5) {
  using Wide = long double;
  Model<Wide> probe = model.template cast<Wide>();
  auto blocks = probe.blocks();
  const auto info = model.block_info();
  if (analytic.blocks.size() != blocks.size()) throw ShapeError("gradient bundle does not mirror the model");

  GradCheckReport report;
  const Wide h = static_cast<Wide>(step);
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    if (static_cast<std::size_t>(analytic.blocks[k].size()) != blocks[k].size()) {
      throw ShapeError("gradient block " + info[k].name + " has the wrong size");
    }
    for (std::size_t e = 0; e < blocks[k].size(); ++e) {
      const Wide saved = blocks[k][e];
      blocks[k][e] = saved + h;
      const Wide up = loss_of_model(std::as_const(probe));
      blocks[k][e] = saved - h;
      const Wide down = loss_of_model(std::as_const(probe));
      blocks[k][e] = saved;
      const double numeric = static_cast<double>((up - down) / (Wide(2) * h));
      const double a = analytic.blocks[k].data()[e];
      const double err = gradient_relative_error(a, numeric);
      ++report.entries_checked;
      if (err > report.max_rel_error || report.worst_entry < 0) {
        report.max_rel_error = err;
        report.worst_block = info[k].name;
        report.worst_entry = static_cast<Index>(e);
        report.worst_analytic = a;
        report.worst_numeric = numeric;
      }
    }
  }
  return report;
}

/// Gradient check of a loss defined on the model outputs Y = f(X).
/// `loss_of_output(Y)` returns {value, dL/dY} and must be generic in the
/// scalar type.
template <template <class> class Model, class LossOfOutput>
GradCheckReport grad_check(const Model<double>& model, const DenseMatrix& x, LossOfOutput&& loss_of_output,
                           double step = 1e-5) {
  const DenseMatrix y = forward(model, x);
  const auto [value, dy] = loss_of_output(y);
  (void)value;
  const GradientBundle<double> analytic = backward(model, x, dy);
  const Matrix<long double> xw = x.cast<long double>();
  return grad_check(
      model, analytic,
      [&](const Model<long double>& m) { return loss_of_output(forward(m, xw)).first; }, step);
}

}  // namespace ptsee

#endif  // PTSEE_GRADCHECK_HPP
