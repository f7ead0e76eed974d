#pragma once

// Squared-exponential Gaussian-process machinery: kernel, posterior covariance
// trace, posterior mean and kernel influence radius.

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "hipp/types.hpp"

namespace hipp {

struct KernelParams {
  double lengthscale = 1.0;
  double signal_variance = 1.0;
  double noise_variance = 0.0;
  /// Tolerance used for the influence radius. Unset means 1% of the signal variance.
  std::optional<double> influence_tolerance;

  double tolerance() const { return influence_tolerance.value_or(0.01 * signal_variance); }

  /// Throws Error(Validation) when an invariant is violated.
  void validate() const;
};

/// A measurement set: locations plus optional observed values.
struct MeasurementSet {
  PointList locations;
  std::vector<double> values;  // empty, or one per location

  bool has_values() const { return !locations.empty() && values.size() == locations.size(); }
};

double kernel_eval(const Point& a, const Point& b, const KernelParams& params);

/// |a| x |b| kernel matrix. Throws Error(Shape) for an empty list.
Eigen::MatrixXd kernel_matrix(PointSpan a, PointSpan b, const KernelParams& params);

/// Cholesky factor of K_XX + noise*I with the jitter ladder applied on failure.
/// Throws Error(Numerical) listing every jitter level tried.
Eigen::LLT<Eigen::MatrixXd> factorize_gram(PointSpan x, const KernelParams& params);

/// Tr(K_TT - K_TX (K_XX + noise I)^-1 K_XT). Equals m * signal_variance when x is empty.
double posterior_cov_trace(PointSpan tests, PointSpan x, const KernelParams& params);

/// Posterior variance at every test point (the diagonal whose sum is the trace).
Eigen::VectorXd posterior_variances(PointSpan tests, PointSpan x, const KernelParams& params);

/// K_TX (K_XX + noise I)^-1 y. Throws Error(Contract) if the measurements carry no values.
Eigen::VectorXd posterior_mean(PointSpan queries, const MeasurementSet& data,
                               const KernelParams& params);

/// l * sqrt(2 ln(signal_variance / tolerance)). Throws Error(Domain) unless 0 < tol < signal_variance.
double kernel_influence_radius(const KernelParams& params);

}  // namespace hipp
