#pragma once

// Comparison planners: monolithic splines from start to goal optimised by
// CMA-ES or by the segment refiner's constrained solver, and the graph path
// with measurements at its vertices.

#include <cstdint>
#include <optional>
#include <vector>

#include "hipp/cmaes.hpp"
#include "hipp/graph.hpp"
#include "hipp/refine.hpp"
#include "hipp/scenario.hpp"
#include "hipp/trajectory.hpp"

namespace hipp {

struct ContinuousConfig {
  int n_ctrl = 14;
  int degree = 3;
  double clearance = 0.0;

  CmaesConfig cmaes;                 // sigma0 is replaced by sigma0_scale * workspace diagonal
  double sigma0_scale = 0.3;
  double budget_penalty = 1e3;       // times signal variance
  double obstacle_penalty = 1e4;
  double workspace_penalty = 1e4;
  int check_samples = 128;           // penalty sample points along the spline
  int m_quad = 128;

  RefineConfig gradient = default_gradient_config();

  static RefineConfig default_gradient_config();
  /// Throws Error(Validation) on out-of-range settings.
  void validate() const;
};

struct BaselinePlan {
  Trajectory trajectory;
  double objective = 0.0;  // posterior trace over all emitted measurements
  double length = 0.0;
  TrajectoryCheck check;   // from validate_trajectory
  long evaluations = 0;
  std::vector<double> history;
  std::optional<GraphPlan> graph;

  bool feasible() const { return check.feasible; }
};

/// Penalised CMA-ES over the interior control points of one spline s -> g.
/// Infeasible output is flagged in `check`, not thrown.
BaselinePlan plan_continuous_cmaes(const Scenario& scenario, const ContinuousConfig& config,
                                   std::uint64_t seed);

/// The refiner's augmented-Lagrangian solver applied to one spline s -> g with
/// budget B, started from the straight line. Infeasible output is flagged.
BaselinePlan plan_continuous_gradient(const Scenario& scenario, const ContinuousConfig& config,
                                      std::uint64_t seed);

/// Optimal graph path; measurements at its distinct vertices, padded to the
/// scenario's measurement count by uniform arc-length samples along the path.
/// Throws Error(Contract) when the count is below the number of distinct vertices.
BaselinePlan plan_graph_only(const Scenario& scenario, const GraphSearchConfig& search = {});

/// Measurements for a graph path as described above, on straight segments.
Trajectory graph_path_trajectory(const InformativeGraph& graph, const GraphPath& path, int n_total);

}  // namespace hipp
