#pragma once

// The three-stage planner: exact graph path, budget allocation over its edges,
// then independent spline refinement of every edge.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "hipp/allocation.hpp"
#include "hipp/graph.hpp"
#include "hipp/refine.hpp"
#include "hipp/scenario.hpp"
#include "hipp/trajectory.hpp"

namespace hipp {

struct HierConfig {
  GraphSearchConfig graph;
  AllocationConfig allocation;
  std::optional<double> alpha;  // coverage sharpness; unset means 10 / lengthscale
  RefineConfig refine;
  int threads = 1;              // workers for segment refinement

  void validate() const;
};

struct StageTimes {
  double graph = 0.0;
  double allocation = 0.0;
  double refine = 0.0;
  double total() const { return graph + allocation + refine; }
};

struct HierPlan {
  GraphPlan graph;
  AllocationProblem allocation_problem;
  Allocation allocation;
  std::vector<SegmentDiagnostics> segments;
  RefinedTrajectory refined;
  TrajectoryCheck check;
  StageTimes times;  // wall seconds
};

/// Seed for segment `index` derived from the plan seed.
std::uint64_t segment_seed(std::uint64_t seed, std::size_t index);

struct RefinementResult {
  std::vector<SegmentDiagnostics> segments;
  RefinedTrajectory refined;
  TrajectoryCheck check;
  double seconds = 0.0;  // wall time of refinement and assembly
};

/// Refines every edge of `path` within its allocated length and assembles the
/// trajectory. Errors carry a "refine stage" or "assembly stage" prefix.
RefinementResult refine_path(const Scenario& scenario, const GraphPath& path,
                             std::span<const double> lengths, const HierConfig& config,
                             std::uint64_t seed);

/// Runs all three stages. Segments are refined on up to config.threads workers
/// and merged by segment index, so the result does not depend on the count.
/// Error messages are prefixed with the failing stage.
HierPlan plan_hierarchical(const Scenario& scenario, const HierConfig& config, std::uint64_t seed);

/// Runs `n` independent jobs on up to `threads` workers; job(i) must only touch
/// state owned by index i. Exceptions are rethrown for the lowest failing index.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& job);

}  // namespace hipp
