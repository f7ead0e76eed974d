#pragma once

// Planar geometry for the planner: obstacles, the environment, arc length,
// focal-sum ellipses and their kernel-radius inflation, signed distances and
// the obstacle pruning predicate.

#include <string>
#include <variant>
#include <vector>

#include "hipp/types.hpp"

namespace hipp {

struct Disk {
  Point center = Point::Zero();
  double radius = 0.0;
};

/// Strictly convex polygon with counter-clockwise vertices.
struct ConvexPolygon {
  PointList vertices;
};

using Obstacle = std::variant<Disk, ConvexPolygon>;

/// Throws Error(Validation) if the obstacle is malformed.
void validate_obstacle(const Obstacle& obs);

/// Bounding rectangle of an obstacle.
Rect bounds(const Obstacle& obs);

struct Environment {
  Rect workspace;
  std::vector<Obstacle> obstacles;

  /// Throws Error(Validation) enumerating every violated invariant.
  void validate() const;

  /// Inside the workspace and not strictly inside any obstacle, with `clearance` slack.
  bool is_free(const Point& p, double clearance = 0.0) const;
};

/// Sum of consecutive chord lengths.
double arc_length(PointSpan polyline);

/// Focal-sum ellipse {x : |x-u| + |x-v| <= L}.
class Ellipse {
 public:
  /// Throws Error(Domain) when L < |u - v|.
  Ellipse(const Point& u, const Point& v, double major_len);

  const Point& focus_u() const { return u_; }
  const Point& focus_v() const { return v_; }
  double major_len() const { return major_; }
  double focal_sum(const Point& x) const { return (x - u_).norm() + (x - v_).norm(); }

 private:
  Point u_;
  Point v_;
  double major_;
};

bool ellipse_contains(const Ellipse& e, const Point& x);

/// Euclidean distance from x to the (filled) ellipse; 0 inside.
double distance_to_ellipse(const Ellipse& e, const Point& x);

/// x in E (+) B(0, r_kernel), using the focal-sum test L + 2 r_kernel as a fast reject.
bool influence_region_contains(const Ellipse& e, double r_kernel, const Point& x);

double point_segment_distance(const Point& x, const Point& a, const Point& b);

/// Positive outside, zero on the boundary, negative inside.
double signed_distance(const Point& x, const Obstacle& obs);

/// Minimum signed distance over a set of obstacles (+inf when empty).
double signed_distance(const Point& x, const std::vector<Obstacle>& obstacles);

/// Obstacle with cached edge normals for repeated signed-distance queries.
/// Agrees with signed_distance(x, obs) up to rounding.
class PreparedObstacle {
 public:
  explicit PreparedObstacle(const Obstacle& obs);
  double signed_distance(const Point& x) const;

 private:
  bool disk_ = false;
  Point center_ = Point::Zero();
  double radius_ = 0.0;
  PointList vertices_;
  PointList normals_;  // unit outward normal of edge i -> i+1
  std::vector<double> offsets_;
};

/// Positive inside the rectangle, negative outside.
double workspace_signed_distance(const Point& x, const Rect& ws);

/// Closest point of the obstacle to x (x itself when inside).
Point project_onto(const Obstacle& obs, const Point& x);

/// True if the closed segment [a, b] touches the obstacle.
bool segment_intersects(const Obstacle& obs, const Point& a, const Point& b);

struct FocalSumBound {
  double upper = 0.0;   // focal sum of the best feasible point found
  double lower = 0.0;   // certified lower bound on the minimum
  int iterations = 0;
  bool converged = false;
};

/// Projected-subgradient minimisation of |p-u| + |p-v| over the obstacle,
/// with a linearisation (Frank-Wolfe gap) certificate for the lower bound.
FocalSumBound focal_sum_bounds(const Obstacle& obs, const Point& u, const Point& v,
                               double tol = 1e-6, int max_iters = 500);

/// Upper bound on min over the obstacle of |p-u| + |p-v|, within `tol` of the
/// minimum. Falls back to |u - v| (never prunes) if the certificate is not reached.
double min_focal_sum(const Obstacle& obs, const Point& u, const Point& v, double tol = 1e-6);

/// Obstacles that may intersect E(u, v, budget); kept iff min_focal_sum <= budget + margin.
std::vector<Obstacle> prune_obstacles(const Environment& env, const Point& u, const Point& v,
                                      double budget, double safety_margin);

/// Indices (into env.obstacles) of obstacles kept by prune_obstacles.
std::vector<std::size_t> kept_obstacle_indices(const Environment& env, const Point& u,
                                               const Point& v, double budget,
                                               double safety_margin);

std::string describe(const Obstacle& obs);

}  // namespace hipp
