#pragma once

// Exact budget-constrained informative path search on a roadmap graph.

#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "hipp/geometry.hpp"
#include "hipp/gp.hpp"

namespace hipp {

struct GraphEdge {
  std::size_t a = 0;
  std::size_t b = 0;
  double length = 0.0;
};

class InformativeGraph {
 public:
  InformativeGraph() = default;
  /// Edge lengths are recomputed from the vertices. Throws Error(Validation) on
  /// bad indices, self loops or duplicate edges.
  InformativeGraph(PointList vertices, const std::vector<std::pair<std::size_t, std::size_t>>& edges);

  const PointList& vertices() const { return vertices_; }
  const std::vector<GraphEdge>& edges() const { return edges_; }
  std::size_t size() const { return vertices_.size(); }

  /// (neighbour, edge index) pairs sorted by neighbour index.
  const std::vector<std::pair<std::size_t, std::size_t>>& neighbours(std::size_t v) const {
    return adjacency_[v];
  }

  /// Index of the edge joining a and b, or npos.
  std::size_t find_edge(std::size_t a, std::size_t b) const;

  /// Checks vertices lie in free space and edges are collision-free by dense
  /// sampling of signed distances. Throws Error(Validation) naming each offender.
  void validate_against(const Environment& env) const;

  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

 private:
  PointList vertices_;
  std::vector<GraphEdge> edges_;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adjacency_;
};

struct GraphPath {
  std::vector<std::size_t> vertices;
  double length = 0.0;

  std::size_t num_edges() const { return vertices.empty() ? 0 : vertices.size() - 1; }
  bool operator==(const GraphPath&) const = default;
};

struct GraphPlan {
  GraphPath path;
  double objective = 0.0;
  std::size_t nodes_expanded = 0;
};

struct GraphSearchConfig {
  /// Allow each vertex to be visited at most twice instead of once.
  bool allow_revisits = false;
};

/// Shortest-path distance from every vertex to `goal`; +inf where unreachable.
std::vector<double> goal_distances(const InformativeGraph& graph, std::size_t goal);

/// Dense all-pairs shortest path distances.
std::vector<std::vector<double>> all_pairs_distances(const InformativeGraph& graph);

/// Measurement locations of a path: its distinct vertices in ascending index order.
PointList path_measurements(const InformativeGraph& graph, const GraphPath& path);

/// Posterior trace over the path's distinct vertices.
double path_objective(const InformativeGraph& graph, const GraphPath& path, PointSpan tests,
                      const KernelParams& params);

/// Tolerance used when comparing budgets (absolute, scaled by max(1, budget)).
double budget_tolerance(double budget);

/// Ordering used to pick among paths: objective, then length, then vertex sequence.
bool better_plan(double obj_a, const GraphPath& a, double obj_b, const GraphPath& b,
                 double tie_tol);

/// Depth-first branch-and-bound over budget-feasible paths from s to g.
/// Throws InfeasibleError when the shortest s-g distance exceeds the budget.
GraphPlan plan_graph_path(const InformativeGraph& graph, std::size_t start, std::size_t goal,
                          double budget, PointSpan tests, const KernelParams& params,
                          const GraphSearchConfig& config = {});

/// Every budget-feasible path from s to g in depth-first order over ascending
/// neighbour indices. Throws Error(Truncation) when more than `cap` exist.
std::vector<GraphPath> enumerate_feasible_paths(const InformativeGraph& graph, std::size_t start,
                                                std::size_t goal, double budget, std::size_t cap,
                                                const GraphSearchConfig& config = {});

/// The optimal plan by exhaustive enumeration, for audits and tests.
GraphPlan best_by_enumeration(const InformativeGraph& graph, std::size_t start, std::size_t goal,
                              double budget, PointSpan tests, const KernelParams& params,
                              std::size_t cap, const GraphSearchConfig& config = {});

}  // namespace hipp
