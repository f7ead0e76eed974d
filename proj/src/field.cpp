#include "hipp/field.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "hipp/error.hpp"

namespace hipp {

const char* to_string(FieldSemantics s) {
  return s == FieldSemantics::Importance ? "importance" : "truth";
}

FieldSemantics field_semantics_from_string(const std::string& s) {
  if (s == "importance") return FieldSemantics::Importance;
  if (s == "truth") return FieldSemantics::Truth;
  throw Error(ErrorKind::Validation, "unknown field semantics '" + s + "'");
}

Point FieldGrid::cell_center(int i, int j) const {
  return {extent.xmin + (i + 0.5) * cell_width(), extent.ymin + (j + 0.5) * cell_height()};
}

PointList FieldGrid::cell_centers() const {
  PointList out;
  out.reserve(values.size());
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) out.push_back(cell_center(i, j));
  }
  return out;
}

double FieldGrid::interpolate(const Point& p) const {
  const double gx = std::clamp((p.x() - extent.xmin) / cell_width() - 0.5, 0.0, nx - 1.0);
  const double gy = std::clamp((p.y() - extent.ymin) / cell_height() - 0.5, 0.0, ny - 1.0);
  const int i0 = std::min(static_cast<int>(gx), nx - 2);
  const int j0 = std::min(static_cast<int>(gy), ny - 2);
  const double fx = gx - i0;
  const double fy = gy - j0;
  return (1 - fx) * (1 - fy) * value(i0, j0) + fx * (1 - fy) * value(i0 + 1, j0) +
         (1 - fx) * fy * value(i0, j0 + 1) + fx * fy * value(i0 + 1, j0 + 1);
}

bool FieldGrid::same_shape(const FieldGrid& other) const {
  return nx == other.nx && ny == other.ny && extent == other.extent;
}

void FieldGrid::validate() const {
  if (nx < 2 || ny < 2) throw Error(ErrorKind::Shape, "field grid needs nx, ny >= 2");
  if (!(extent.area() > 0.0)) throw Error(ErrorKind::Shape, "field grid extent has no area");
  if (values.size() != static_cast<std::size_t>(nx) * ny) {
    std::ostringstream msg;
    msg << "field grid has " << values.size() << " values, expected " << nx * ny;
    throw Error(ErrorKind::Shape, msg.str());
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorKind::Domain, "field grid value is not finite");
  }
  if (semantics == FieldSemantics::Importance) {
    double total = 0.0;
    for (double v : values) {
      if (v < 0.0) throw Error(ErrorKind::Domain, "importance values must be >= 0");
      total += v;
    }
    if (!(total > 0.0)) throw Error(ErrorKind::Domain, "importance field has no mass");
  }
}

FieldGrid posterior_mean_grid(const FieldGrid& like, const MeasurementSet& data,
                              const KernelParams& params) {
  FieldGrid out = like;
  out.semantics = FieldSemantics::Truth;
  const Eigen::VectorXd mu = posterior_mean(like.cell_centers(), data, params);
  out.values.assign(mu.data(), mu.data() + mu.size());
  return out;
}

double weighted_rmse(const FieldGrid& mean, const FieldGrid& truth, const FieldGrid& importance) {
  if (!mean.same_shape(truth) || !mean.same_shape(importance) ||
      mean.values.size() != truth.values.size() || mean.values.size() != importance.values.size()) {
    throw Error(ErrorKind::Shape, "weighted_rmse: grids differ in extent or resolution");
  }
  double total = 0.0;
  for (double w : importance.values) {
    if (w < 0.0) throw Error(ErrorKind::Domain, "weighted_rmse: negative importance");
    total += w;
  }
  if (!(total > 0.0)) throw Error(ErrorKind::Domain, "weighted_rmse: importance is all zero");
  double acc = 0.0;
  for (std::size_t k = 0; k < mean.values.size(); ++k) {
    const double d = mean.values[k] - truth.values[k];
    acc += importance.values[k] / total * d * d;
  }
  return std::sqrt(acc);
}

PointList sample_test_points(const FieldGrid& importance, const Environment& env, int m,
                             std::uint64_t seed) {
  importance.validate();
  if (m < 1) throw Error(ErrorKind::Contract, "sample_test_points: m must be >= 1");
  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> pick(importance.values.begin(), importance.values.end());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PointList out;
  out.reserve(m);
  const long budget = 1000L * m;
  for (long attempt = 0; attempt < budget && static_cast<int>(out.size()) < m; ++attempt) {
    const std::size_t cell = pick(rng);
    const int i = static_cast<int>(cell % importance.nx);
    const int j = static_cast<int>(cell / importance.nx);
    const Point p(importance.extent.xmin + (i + unit(rng)) * importance.cell_width(),
                  importance.extent.ymin + (j + unit(rng)) * importance.cell_height());
    if (env.workspace.contains(p) && env.is_free(p, 0.0)) out.push_back(p);
  }
  if (static_cast<int>(out.size()) < m) {
    std::ostringstream msg;
    msg << "sample_test_points: only " << out.size() << " of " << m
        << " points landed in free space after " << budget << " attempts";
    throw Error(ErrorKind::Infeasible, msg.str());
  }
  return out;
}

}  // namespace hipp
