#pragma once

// Slow reference computations for audits: explicit-inverse GP formulas and an
// exhaustive grid over budget allocations. Graph enumeration lives in graph.hpp.

#include <Eigen/Dense>

#include "hipp/allocation.hpp"
#include "hipp/gp.hpp"

namespace hipp {

/// Trace of K_TT - K_TX inv(K_XX + noise I) K_XT with an explicit LU inverse.
double dense_posterior_trace(PointSpan tests, PointSpan x, const KernelParams& params);

/// K_TX inv(K_XX + noise I) y with an explicit LU inverse.
Eigen::VectorXd dense_posterior_mean(PointSpan queries, const MeasurementSet& data,
                                     const KernelParams& params);

struct GridAllocation {
  Eigen::VectorXd lengths;
  double value = 0.0;
  long evaluated = 0;
};

/// Best allocation among those giving each edge its geometric length plus a
/// multiple of `resolution`, with the whole usable slack spent. Throws
/// Error(Truncation) when more than `cap` points would be evaluated.
GridAllocation grid_search_allocation(const AllocationProblem& problem, double resolution,
                                      long cap = 5'000'000);

}  // namespace hipp
