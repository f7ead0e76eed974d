#pragma once

// Planned trajectories as chains of B-spline segments, plus the checks every
// planner's output goes through.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hipp/bspline.hpp"
#include "hipp/geometry.hpp"
#include "hipp/gp.hpp"

namespace hipp {

/// Segments chained end to start, with the measurement samples taken on each.
struct Trajectory {
  std::vector<SplineSegment> segments;
  std::vector<std::vector<double>> measurement_t;  // parameters per segment
  std::vector<PointList> measurement_points;       // matching points per segment

  /// All measurement points, segment by segment.
  PointList measurements() const;
  std::size_t num_measurements() const;
};

/// Chord-sum length over `intervals` parameter intervals per segment.
double trajectory_length(const Trajectory& traj, int intervals);

/// Splits n_total measurements over segments in proportion to their lengths by
/// largest remainder, at least 2 each. Throws Error(Contract) if n_total < 2 * size.
std::vector<int> distribute_measurements(std::span<const double> lengths, int n_total);

struct RefinedTrajectory {
  Trajectory trajectory;
  std::vector<int> counts;
  std::vector<double> segment_objectives;  // each segment on its own
  std::vector<double> segment_lengths;
  double objective = 0.0;                  // over the union of all samples
  double total_length = 0.0;
};

/// Concatenates refined segments, samples counts[e] measurements on each and
/// scores the union. Throws Error(Assembly) if segments do not chain or the
/// lengths break sum(L) <= allocation <= budget.
RefinedTrajectory assemble_trajectory(std::vector<SplineSegment> segments,
                                      std::span<const double> allocation, PointSpan tests,
                                      const KernelParams& params, int n_total, double budget,
                                      int m_quad = 128);

struct TrajectoryCheck {
  bool feasible = false;
  bool chained = false;
  bool length_ok = false;
  double length = 0.0;
  double min_obstacle_clearance = 0.0;
  double min_workspace_clearance = 0.0;
  std::ptrdiff_t worst_obstacle = -1;
  std::string reason;  // empty when feasible
};

/// Dense check shared by all planners: chaining from start to goal, length
/// within the budget, and every sampled point and measurement in free space.
TrajectoryCheck validate_trajectory(const Trajectory& traj, const Environment& env,
                                    const Point& start, const Point& goal, double budget,
                                    double clearance = 0.0, int intervals = 1024);

}  // namespace hipp
