#pragma once

// Per-edge B-spline refinement: minimise the posterior trace of the segment's
// measurement samples subject to the allocated length, the workspace and the
// obstacles that can reach the segment's ellipse.

#include <cstdint>
#include <optional>
#include <vector>

#include "hipp/bspline.hpp"
#include "hipp/geometry.hpp"
#include "hipp/gp.hpp"

namespace hipp {

struct RefineConfig {
  int n_ctrl = 5;
  int degree = 3;
  int n_env = 32;
  int n_obs = 32;
  int m_quad = 128;
  double length_guard = 1.002;
  double clearance = 0.0;  // required signed distance to obstacles
  /// Extra focal-sum slack when pruning obstacles. Unset means 1e-3 * lengthscale.
  std::optional<double> prune_margin;

  int al_rounds = 8;
  double penalty_growth = 10.0;
  int inner_iters = 60;
  double inner_tol = 1e-6;
  double fd_step = 1e-6;  // relative to the segment scale

  /// Re-solves after adding dense-check violations as constraint samples.
  int exchange_rounds = 3;

  int perturbed_starts = 3;
  double perturb_scale = 0.1;  // times the slack L_e - |u - v|

  int validate_intervals = 1024;  // dense feasibility check per segment
  bool sequential_conditioning = false;

  /// Throws Error(Validation) if a count or tolerance is out of range.
  void validate() const;
};

/// Posterior trace with X = sample_segment(seg, n) (plus optional fixed measurements).
double segment_objective(const SplineSegment& seg, PointSpan tests, const KernelParams& params,
                         int n, PointSpan prior = {});

struct SegmentCheck {
  bool feasible = false;
  bool length_ok = false;
  double min_obstacle_clearance = 0.0;  // min signed distance over samples and obstacles
  double min_workspace_clearance = 0.0;
  double length = 0.0;                  // chord-sum estimate
  double guarded_length = 0.0;
  std::ptrdiff_t worst_obstacle = -1;   // index into the obstacle list, -1 if none
};

/// Dense feasibility check of one spline against a length bound and obstacles,
/// probing validate_intervals + 1 uniform parameters and, when n_samples > 0,
/// the measurement samples too.
SegmentCheck check_segment(const SplineSegment& seg, double length_budget,
                           const std::vector<Obstacle>& obstacles, const Rect& workspace,
                           const RefineConfig& config, int n_samples = 0);

/// Everything the spline optimiser needs for one segment.
struct SplineProblem {
  Point start = Point::Zero();
  Point goal = Point::Zero();
  double length_budget = 0.0;
  PointList tests;
  KernelParams params;
  std::vector<Obstacle> obstacles;  // already pruned
  Rect workspace;
  int n_samples = 2;
  PointList prior;                  // fixed measurements, empty unless conditioning
};

struct SegmentDiagnostics {
  double initial_objective = 0.0;
  double objective = 0.0;
  std::size_t kept_obstacles = 0;
  std::size_t pruned_obstacles = 0;
  int best_start = -1;  // -1: the straight initialisation was kept
  int evaluations = 0;
  bool feasible = false;
  double max_violation = 0.0;
  SegmentCheck check;
};

struct SplineSolution {
  SplineSegment spline;
  SegmentDiagnostics diagnostics;
};

/// Multi-start augmented Lagrangian from `init`. When `init` is feasible the
/// result is feasible and never worse than it; otherwise the least-violating
/// candidate is returned with diagnostics.feasible set accordingly.
SplineSolution optimize_spline(const SplineProblem& problem, const SplineSegment& init,
                               const RefineConfig& config, std::uint64_t seed);

/// Refines the straight edge u -> v within length_budget. Throws Error(Validation)
/// naming the obstacle if the straight initialisation is infeasible.
SplineSolution refine_segment(const Point& u, const Point& v, double length_budget,
                              PointSpan tests, const Environment& env, const KernelParams& params,
                              int n_samples, const RefineConfig& config, std::uint64_t seed,
                              PointSpan prior = {});

}  // namespace hipp
