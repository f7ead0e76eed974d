#pragma once

// Scalar fields sampled on a regular grid of cells: importance densities and
// ground truth for evaluation.

#include <cstdint>
#include <string>
#include <vector>

#include "hipp/geometry.hpp"
#include "hipp/gp.hpp"

namespace hipp {

enum class FieldSemantics { Importance, Truth };

const char* to_string(FieldSemantics s);
FieldSemantics field_semantics_from_string(const std::string& s);

/// nx * ny cell values over `extent`; value(i, j) sits at the centre of cell
/// column i, row j, stored row-major with rows (j) outermost.
struct FieldGrid {
  Rect extent;
  int nx = 0;
  int ny = 0;
  std::vector<double> values;
  FieldSemantics semantics = FieldSemantics::Truth;

  double value(int i, int j) const { return values[static_cast<std::size_t>(j) * nx + i]; }
  Point cell_center(int i, int j) const;
  double cell_width() const { return extent.width() / nx; }
  double cell_height() const { return extent.height() / ny; }
  PointList cell_centers() const;

  /// Bilinear interpolation between cell centres, clamped at the border.
  double interpolate(const Point& p) const;

  bool same_shape(const FieldGrid& other) const;

  /// Throws Error(Shape) or Error(Domain) on bad sizes or, for importance
  /// grids, negative or all-zero values.
  void validate() const;
};

/// A grid shaped like `like` holding the posterior mean at each cell centre.
FieldGrid posterior_mean_grid(const FieldGrid& like, const MeasurementSet& data,
                              const KernelParams& params);

/// sqrt(sum_j w_j (mean_j - truth_j)^2) with w the normalised importance.
double weighted_rmse(const FieldGrid& mean, const FieldGrid& truth, const FieldGrid& importance);

/// Draws m free-space points from the normalised importance density: a cell by
/// weight, then a uniform point inside it, rejected if not free. Gives up with
/// Error(Infeasible) after 1000 * m attempts.
PointList sample_test_points(const FieldGrid& importance, const Environment& env, int m,
                             std::uint64_t seed);

}  // namespace hipp
