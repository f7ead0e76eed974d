#pragma once

// Planner dispatch, plan reports and the artifact files written for a run.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hipp/config.hpp"
#include "hipp/scenario.hpp"
#include "hipp/trajectory.hpp"

namespace hipp {

enum class PlannerKind { Hier, Graph, Cmaes, Gradient };

const char* to_string(PlannerKind kind);
/// Accepts "hier", "graph", "cmaes", "gradient". Throws Error(Validation).
PlannerKind planner_from_string(const std::string& name);

struct EdgeAllocation {
  std::size_t a = 0;
  std::size_t b = 0;
  double geometric = 0.0;
  double allocated = 0.0;
};

struct PlanReport {
  PlannerKind planner = PlannerKind::Hier;
  std::uint64_t seed = 0;
  double objective = 0.0;     // posterior trace over the emitted measurements
  double total_length = 0.0;  // dense chord-sum length
  bool feasible = false;
  std::string reason;         // validator finding when infeasible
  int n_measurements = 0;
  std::vector<std::size_t> graph_path;     // hier and graph planners
  std::vector<EdgeAllocation> allocations; // hier planner
  std::optional<double> weighted_rmse;     // when the scenario has a truth grid
  StageTimes times;                        // wall seconds; cmaes and gradient use `refine`
  double runtime = 0.0;
  nlohmann::json config;
};

struct PlanOutput {
  PlanReport report;
  Trajectory trajectory;
  std::vector<Ellipse> ellipses;  // allocation regions of the hier planner
};

/// Runs one planner. The reported objective, length and feasibility are
/// recomputed from the emitted trajectory alone.
PlanOutput run_planner(const Scenario& scenario, PlannerKind planner, const PlannerConfig& config,
                       std::uint64_t seed);

/// Builds the report for a hierarchical refinement of a fixed path and allocation.
PlanOutput refine_from_allocation(const Scenario& scenario, const GraphPath& path,
                                  const std::vector<double>& lengths, const PlannerConfig& config,
                                  std::uint64_t seed);

/// Importance-weighted RMSE of the posterior mean when measurements read the
/// truth grid. Uses a uniform weight when the scenario has no importance grid.
/// Returns nullopt without a truth grid.
std::optional<double> scenario_weighted_rmse(const Scenario& scenario, PointSpan measurements);

/// Deterministic report: everything except wall-clock times.
nlohmann::json plan_json(const PlanOutput& plan);
/// Runtime per stage plus the headline numbers.
nlohmann::json metrics_json(const PlanReport& report);

/// Rows: segment_index,t,x,y,is_measurement. Curve samples and measurement
/// samples are merged per segment in parameter order.
std::string trajectory_csv(const Trajectory& traj, int samples_per_segment = 65);
std::string measurements_csv(const Trajectory& traj);

/// Parses trajectory_csv output back into per-segment measurement points.
std::vector<PointList> measurements_from_trajectory_csv(const std::string& text);

/// Writes plan.json, trajectory.csv, measurements.csv, plot.svg and
/// metrics.json into out_dir. Files already written are removed if a later
/// write fails.
void write_artifacts(const std::filesystem::path& out_dir, const Scenario& scenario,
                     const PlanOutput& plan);

/// run_planner followed by write_artifacts. Nothing is written when planning fails.
PlanReport run_pipeline(const Scenario& scenario, PlannerKind planner, const PlannerConfig& config,
                        std::uint64_t seed, const std::filesystem::path& out_dir);

/// Graph path and allocation, as written by the allocate subcommand.
struct AllocationFile {
  std::uint64_t seed = 0;
  GraphPath path;
  std::vector<double> lengths;
  double coverage = 0.0;
};

nlohmann::json to_json(const AllocationFile& file, const Scenario& scenario);
/// Throws Error(Validation) when the path is not a walk on the scenario graph
/// from start to goal or the lengths do not match its edges.
AllocationFile allocation_file_from_json(const nlohmann::json& j, const Scenario& scenario);

}  // namespace hipp
