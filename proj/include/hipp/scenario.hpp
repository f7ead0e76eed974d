#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hipp/field.hpp"
#include "hipp/geometry.hpp"
#include "hipp/gp.hpp"
#include "hipp/graph.hpp"

namespace hipp {

/// Test points drawn from an importance grid stored next to the scenario.
struct TestSampling {
  std::string importance;  // path relative to the scenario file
  int m = 0;
  std::uint64_t seed = 0;

  bool operator==(const TestSampling&) const = default;
};

struct Scenario {
  Environment env;
  InformativeGraph graph;
  KernelParams kernel;
  double budget = 0.0;
  std::size_t start = 0;
  std::size_t goal = 0;
  int n_measurements = 0;

  /// Explicit test points, or the points drawn when `sampling` is set.
  PointList test_points;
  std::optional<TestSampling> sampling;
  std::optional<std::string> truth;  // truth grid path relative to the scenario file

  std::optional<FieldGrid> importance_grid;
  std::optional<FieldGrid> truth_grid;

  const Point& start_point() const { return graph.vertices()[start]; }
  const Point& goal_point() const { return graph.vertices()[goal]; }
  std::size_t num_edges() const { return graph.edges().size(); }

  /// Checks every cross-field invariant: environment, graph collision checks,
  /// distinct in-range start and goal, tests inside the workspace and a budget
  /// that reaches the goal. Collects all problems into one Error(Validation),
  /// except a short budget which throws InfeasibleError with the deficit.
  void validate() const;

  /// Non-fatal findings such as duplicated test points.
  std::vector<std::string> warnings() const;
};

}  // namespace hipp
