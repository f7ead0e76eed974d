#pragma once

#include <Eigen/Core>
#include <cmath>
#include <span>
#include <vector>

namespace hipp {

using Point = Eigen::Vector2d;
using PointList = std::vector<Point>;
using PointSpan = std::span<const Point>;

/// Axis-aligned rectangle.
struct Rect {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 0.0;
  double ymax = 0.0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double area() const { return width() * height(); }
  double diagonal() const { return std::hypot(width(), height()); }
  bool contains(const Point& p) const {
    return p.x() >= xmin && p.x() <= xmax && p.y() >= ymin && p.y() <= ymax;
  }
  bool operator==(const Rect&) const = default;
};

}  // namespace hipp
