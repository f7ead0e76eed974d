#include "hipp/gp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hipp/error.hpp"

namespace hipp {

void KernelParams::validate() const {
  std::ostringstream err;
  if (!(lengthscale > 0.0) || !std::isfinite(lengthscale)) err << "lengthscale must be > 0; ";
  if (!(signal_variance > 0.0) || !std::isfinite(signal_variance))
    err << "signal_variance must be > 0; ";
  if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance))
    err << "noise_variance must be >= 0; ";
  const double tol = tolerance();
  if (!(tol > 0.0 && tol < signal_variance))
    err << "influence_tolerance must lie in (0, signal_variance); ";
  if (!err.str().empty()) throw Error(ErrorKind::Validation, "kernel: " + trim_separators(err.str()));
}

double kernel_eval(const Point& a, const Point& b, const KernelParams& params) {
  const double l = params.lengthscale;
  return params.signal_variance * std::exp(-(a - b).squaredNorm() / (2.0 * l * l));
}

Eigen::MatrixXd kernel_matrix(PointSpan a, PointSpan b, const KernelParams& params) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::Shape, "kernel_matrix: empty point list");
  const double inv = 1.0 / (2.0 * params.lengthscale * params.lengthscale);
  Eigen::MatrixXd k(a.size(), b.size());
  for (std::size_t j = 0; j < b.size(); ++j) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      k(i, j) = params.signal_variance * std::exp(-(a[i] - b[j]).squaredNorm() * inv);
    }
  }
  return k;
}

namespace {

Eigen::MatrixXd gram(PointSpan x, const KernelParams& params) {
  const double inv = 1.0 / (2.0 * params.lengthscale * params.lengthscale);
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    k(j, j) = params.signal_variance + params.noise_variance;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v = params.signal_variance * std::exp(-(x[i] - x[j]).squaredNorm() * inv);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

// n x m cross-covariance K_XT, laid out for an in-place triangular solve.
Eigen::MatrixXd cross(PointSpan x, PointSpan tests, const KernelParams& params) {
  const double inv = 1.0 / (2.0 * params.lengthscale * params.lengthscale);
  Eigen::MatrixXd k(x.size(), tests.size());
  for (std::size_t j = 0; j < tests.size(); ++j) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      k(i, j) = params.signal_variance * std::exp(-(x[i] - tests[j]).squaredNorm() * inv);
    }
  }
  return k;
}

}  // namespace

Eigen::LLT<Eigen::MatrixXd> factorize_gram(PointSpan x, const KernelParams& params) {
  Eigen::MatrixXd k = gram(x, params);
  Eigen::LLT<Eigen::MatrixXd> llt(k);
  if (llt.info() == Eigen::Success) return llt;

  std::ostringstream tried;
  tried << "0";
  double added = 0.0;
  for (double jitter = 1e-10; jitter <= 1e-4 * 1.0000001; jitter *= 10.0) {
    const double level = jitter * params.signal_variance;
    k.diagonal().array() += level - added;
    added = level;
    tried << ", " << level;
    llt.compute(k);
    if (llt.info() == Eigen::Success) return llt;
  }
  throw Error(ErrorKind::Numerical,
              "gram matrix factorization failed; jitter levels tried: " + tried.str());
}

Eigen::VectorXd posterior_variances(PointSpan tests, PointSpan x, const KernelParams& params) {
  Eigen::VectorXd var = Eigen::VectorXd::Constant(tests.size(), params.signal_variance);
  if (x.empty() || tests.empty()) return var;
  const auto llt = factorize_gram(x, params);
  Eigen::MatrixXd v = cross(x, tests, params);
  llt.matrixL().solveInPlace(v);
  var -= v.colwise().squaredNorm().transpose();
  return var.cwiseMax(0.0);
}

double posterior_cov_trace(PointSpan tests, PointSpan x, const KernelParams& params) {
  const double prior = static_cast<double>(tests.size()) * params.signal_variance;
  if (x.empty() || tests.empty()) return prior;
  const auto llt = factorize_gram(x, params);
  Eigen::MatrixXd v = cross(x, tests, params);
  llt.matrixL().solveInPlace(v);
  const double reduced = prior - v.squaredNorm();
  return std::clamp(reduced, 0.0, prior);
}

Eigen::VectorXd posterior_mean(PointSpan queries, const MeasurementSet& data,
                               const KernelParams& params) {
  if (!data.has_values()) {
    throw Error(ErrorKind::Contract, "posterior_mean: measurement values missing or mismatched");
  }
  const auto llt = factorize_gram(data.locations, params);
  const Eigen::Map<const Eigen::VectorXd> y(data.values.data(),
                                             static_cast<Eigen::Index>(data.values.size()));
  const Eigen::VectorXd alpha = llt.solve(y);
  if (queries.empty()) return Eigen::VectorXd();
  return cross(data.locations, queries, params).transpose() * alpha;
}

double kernel_influence_radius(const KernelParams& params) {
  const double tol = params.tolerance();
  if (!(tol > 0.0 && tol < params.signal_variance)) {
    throw Error(ErrorKind::Domain, "kernel_influence_radius: tolerance must lie in (0, signal_variance)");
  }
  return params.lengthscale * std::sqrt(2.0 * std::log(params.signal_variance / tol));
}

}  // namespace hipp
