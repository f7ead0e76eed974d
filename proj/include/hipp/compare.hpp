#pragma once

// Multi-planner benchmark runs and their summary tables.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hipp/pipeline.hpp"

namespace hipp {

struct RunResult {
  std::string instance;  // scenario name plus seed
  double objective = 0.0;
  double runtime = 0.0;
  bool feasible = false;
};

/// All runs of one planner column. A planner listed twice gets two columns.
struct PlannerRuns {
  std::string name;
  std::vector<RunResult> runs;
};

struct Stats {
  double mean = 0.0;
  double median = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single run
};

Stats summarize(std::vector<double> values);

struct PlannerSummary {
  std::string name;
  int runs = 0;
  int feasible = 0;
  Stats objective;
  Stats runtime;
};

struct Comparison {
  std::vector<PlannerSummary> rows;
  /// win_rate[a][b]: share of instances run by both where a's objective is
  /// strictly below b's. Diagonal entries are 0.
  std::vector<std::vector<double>> win_rate;
};

Comparison compare(const std::vector<PlannerRuns>& columns);

std::string comparison_csv(const Comparison& c);
std::string comparison_markdown(const Comparison& c);

/// Every planner on every (scenario, seed) pair, in that nesting order. Runs
/// are sequential so that wall times are not distorted by sharing cores.
std::vector<PlannerRuns> run_suite(const std::vector<std::pair<std::string, Scenario>>& scenarios,
                                   const std::vector<PlannerKind>& planners,
                                   const std::vector<std::uint64_t>& seeds,
                                   const PlannerConfig& config);

}  // namespace hipp
