#pragma once

// Deterministic SVG and CSV output. SVG uses rect, text and line elements
// only; numbers are formatted without the C locale.

#include <string>
#include <vector>

#include "heterolab/experiment.hpp"
#include "heterolab/matrix.hpp"

namespace heterolab {

struct HeatmapSpec {
  Matrix matrix;
  std::vector<std::string> row_labels;  // empty = "0".."C-1"
  std::vector<std::string> col_labels;
  double lo = 0.0;
  double hi = 1.0;
  int precision = 2;
  std::string title;
};

// Throws ValidationError for a non-square, empty or non-finite matrix.
std::string render_heatmap(const HeatmapSpec& spec);

// x = homophily ratio (descending left to right), y = accuracy with std
// error bars. Needs at least two points.
std::string render_curve(const ExperimentResult& result);

std::string matrix_csv(const Matrix& m, int precision = 6);

// Fixed-notation decimal, independent of the global locale.
std::string format_fixed(double v, int precision);

}  // namespace heterolab
