#include "hipp/oracle.hpp"

#include <cmath>
#include <functional>

#include "hipp/error.hpp"

namespace hipp {

namespace {

Eigen::MatrixXd gram_inverse(PointSpan x, const KernelParams& params) {
  Eigen::MatrixXd k = kernel_matrix(x, x, params);
  k.diagonal().array() += params.noise_variance;
  return k.fullPivLu().inverse();
}

}  // namespace

double dense_posterior_trace(PointSpan tests, PointSpan x, const KernelParams& params) {
  if (tests.empty()) return 0.0;
  if (x.empty()) return params.signal_variance * static_cast<double>(tests.size());
  const Eigen::MatrixXd ktx = kernel_matrix(tests, x, params);
  const Eigen::MatrixXd cov = kernel_matrix(tests, tests, params) - ktx * gram_inverse(x, params) * ktx.transpose();
  return cov.trace();
}

Eigen::VectorXd dense_posterior_mean(PointSpan queries, const MeasurementSet& data,
                                     const KernelParams& params) {
  if (!data.has_values()) throw Error(ErrorKind::Contract, "dense posterior mean: measurements carry no values");
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(data.values.data(), data.values.size());
  return kernel_matrix(queries, data.locations, params) * (gram_inverse(data.locations, params) * y);
}

GridAllocation grid_search_allocation(const AllocationProblem& p, double resolution, long cap) {
  if (!(resolution > 0.0)) throw Error(ErrorKind::Domain, "grid search: resolution must be > 0");
  const Eigen::VectorXd lower = p.geometric_lengths();
  const Eigen::Index n = lower.size();
  GridAllocation best;
  if (n == 0) return best;
  const double slack = std::max(0.0, p.budget - lower.sum());
  const long units = static_cast<long>(std::floor(slack / resolution + 1e-9));

  // Number of compositions of `units` into n parts.
  double count = 1.0;
  for (Eigen::Index i = 1; i < n; ++i) count = count * static_cast<double>(units + i) / static_cast<double>(i);
  if (count > static_cast<double>(cap)) {
    throw Error(ErrorKind::Truncation, "grid search: " + std::to_string(static_cast<long>(count)) +
                                           " points exceed the cap of " + std::to_string(cap));
  }

  Eigen::VectorXd l = lower;
  best.value = -1.0;
  std::function<void(Eigen::Index, long)> rec = [&](Eigen::Index e, long left) {
    if (e == n - 1) {
      l(e) = lower(e) + left * resolution;
      const double v = allocation_objective(l, p).value;
      ++best.evaluated;
      if (v > best.value) {
        best.value = v;
        best.lengths = l;
      }
      return;
    }
    for (long u = 0; u <= left; ++u) {
      l(e) = lower(e) + u * resolution;
      rec(e + 1, left - u);
    }
  };
  rec(0, units);
  return best;
}

}  // namespace hipp
