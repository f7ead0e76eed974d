#pragma once

// Segment-wise budget allocation: distribute the global budget over the edges
// of a graph path by maximising a smooth count of test points covered by the
// edges' kernel-inflated reachability ellipses.

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hipp/types.hpp"

namespace hipp {

struct AllocationProblem {
  std::vector<std::pair<Point, Point>> edges;
  PointList tests;
  Eigen::MatrixXd focal;  // focal(e, j) = |tau_j - u_e| + |tau_j - v_e|
  double budget = 0.0;
  double r_kernel = 0.0;
  double alpha = 1.0;

  /// Builds the focal-distance matrix. Throws Error(Validation) if alpha <= 0
  /// or Infeasible when the geometric lengths exceed the budget.
  static AllocationProblem make(std::vector<std::pair<Point, Point>> edges, PointList tests,
                                double budget, double r_kernel, double alpha);

  std::size_t num_edges() const { return edges.size(); }
  Eigen::VectorXd geometric_lengths() const;
};

struct AllocationConfig {
  int max_iters = 2000;
  double tol = 1e-8;        // stop when the projected-gradient step norm falls below this
  double armijo_c = 1e-4;
  int perturbed_starts = 5;
  std::uint64_t seed = 0;
  bool record_iterates = false;
};

struct Allocation {
  Eigen::VectorXd lengths;
  double coverage = 0.0;
  int iterations = 0;
  int best_start = 0;
  std::vector<double> objective_history;     // best start, one entry per accepted iterate
  std::vector<Eigen::VectorXd> iterates;     // filled when record_iterates is set
};

/// 1 / (1 + exp(alpha (d - L - 2 r))), exponent clamped to [-500, 500].
double coverage_sigmoid(double length, double focal_dist, double r_kernel, double alpha);

/// 1 - prod_e (1 - s_e).
double coverage_union(std::span<const double> s);

struct ObjectiveValue {
  double value = 0.0;
  Eigen::VectorXd gradient;
};

/// Sum of z_j and its analytic gradient.
ObjectiveValue allocation_objective(const Eigen::VectorXd& lengths, const AllocationProblem& p);

/// Euclidean projection onto {L >= lower, sum L <= budget}.
Eigen::VectorXd project_feasible(const Eigen::VectorXd& lengths, const Eigen::VectorXd& lower,
                                 double budget);

/// Proportional-to-length split of the slack, the deterministic first start.
Eigen::VectorXd initial_allocation(const AllocationProblem& p);

/// Multi-start projected gradient ascent with Armijo backtracking.
Allocation solve_allocation(const AllocationProblem& p, const AllocationConfig& config = {});

}  // namespace hipp
