#pragma once

// Small dense optimisers: BFGS with finite-difference gradients, and an
// augmented-Lagrangian outer loop for inequality constraints g(x) <= 0.

#include <functional>

#include <Eigen/Dense>

namespace hipp {

/// Objective value plus inequality constraint values (feasible when all <= 0).
struct ConstrainedValue {
  double objective = 0.0;
  Eigen::VectorXd constraints;
};

using ConstrainedFn = std::function<ConstrainedValue(const Eigen::VectorXd&)>;
using ScalarFn = std::function<double(const Eigen::VectorXd&)>;

Eigen::VectorXd central_difference(const ScalarFn& f, const Eigen::VectorXd& x, double h);

struct BfgsConfig {
  int max_iters = 100;
  double grad_tol = 1e-6;
  double step_tol = 1e-12;
  double fd_step = 1e-6;
};

struct BfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  Eigen::MatrixXd inverse_hessian;  // final estimate, usable as a warm start
};

/// `h_inv0` seeds the inverse-Hessian estimate; identity (rescaled after the
/// first step) when null.
BfgsResult minimize_bfgs(const ScalarFn& f, const Eigen::VectorXd& x0, const BfgsConfig& config,
                         const Eigen::MatrixXd* h_inv0 = nullptr);

struct AugLagConfig {
  int rounds = 8;
  double penalty = 1.0;        // initial penalty weight
  double penalty_growth = 10.0;
  double feasibility_tol = 1e-9;
  BfgsConfig inner;
};

struct AugLagResult {
  Eigen::VectorXd x;
  double objective = 0.0;
  double max_violation = 0.0;
  int rounds = 0;
  int evaluations = 0;
};

AugLagResult minimize_augmented_lagrangian(const ConstrainedFn& fn, const Eigen::VectorXd& x0,
                                           const AugLagConfig& config);

}  // namespace hipp
