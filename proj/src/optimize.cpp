#include "hipp/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hipp {

Eigen::VectorXd central_difference(const ScalarFn& f, const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double xi = x(i);
    probe(i) = xi + h;
    const double fp = f(probe);
    probe(i) = xi - h;
    const double fm = f(probe);
    probe(i) = xi;
    g(i) = (fp - fm) / (2.0 * h);
  }
  return g;
}

BfgsResult minimize_bfgs(const ScalarFn& f, const Eigen::VectorXd& x0, const BfgsConfig& config,
                         const Eigen::MatrixXd* h_inv0) {
  const Eigen::Index n = x0.size();
  BfgsResult out;
  int evals = 0;
  auto counted = [&](const Eigen::VectorXd& x) {
    ++evals;
    return f(x);
  };
  Eigen::VectorXd x = x0;
  double fx = counted(x);
  Eigen::VectorXd g = central_difference(counted, x, config.fd_step);
  const bool warm = h_inv0 != nullptr && h_inv0->rows() == n && h_inv0->cols() == n;
  Eigen::MatrixXd h_inv = warm ? *h_inv0 : Eigen::MatrixXd::Identity(n, n);
  bool scaled = warm;

  for (int it = 0; it < config.max_iters; ++it) {
    if (!std::isfinite(fx) || g.lpNorm<Eigen::Infinity>() <= config.grad_tol) break;
    Eigen::VectorXd dir = -h_inv * g;
    double slope = g.dot(dir);
    if (!(slope < 0.0)) {
      h_inv.setIdentity();
      dir = -g;
      slope = -g.squaredNorm();
    }
    double step = 1.0;
    Eigen::VectorXd xn;
    double fn = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      xn = x + step * dir;
      fn = counted(xn);
      if (std::isfinite(fn) && fn <= fx + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    const Eigen::VectorXd s = xn - x;
    const Eigen::VectorXd gn = central_difference(counted, xn, config.fd_step);
    const Eigen::VectorXd y = gn - g;
    x = xn;
    fx = fn;
    g = gn;
    out.iterations = it + 1;
    if (s.lpNorm<Eigen::Infinity>() <= config.step_tol) break;
    const double sy = s.dot(y);
    if (sy > 1e-14 * s.norm() * y.norm()) {
      if (!scaled) {
        h_inv *= sy / y.squaredNorm();
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd left = Eigen::MatrixXd::Identity(n, n) - rho * s * y.transpose();
      h_inv = left * h_inv * left.transpose() + rho * s * s.transpose();
    }
  }
  out.x = x;
  out.value = fx;
  out.evaluations = evals;
  out.inverse_hessian = std::move(h_inv);
  return out;
}

AugLagResult minimize_augmented_lagrangian(const ConstrainedFn& fn, const Eigen::VectorXd& x0,
                                           const AugLagConfig& config) {
  AugLagResult out;
  Eigen::VectorXd x = x0;
  ConstrainedValue v = fn(x);
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(v.constraints.size());
  double mu = config.penalty;
  int evals = 1;
  Eigen::MatrixXd h_inv;

  for (int round = 0; round < config.rounds; ++round) {
    // Powell-Hestenes-Rockafellar merit for g(x) <= 0.
    auto merit = [&](const Eigen::VectorXd& z) {
      const ConstrainedValue cv = fn(z);
      double m = cv.objective;
      for (Eigen::Index i = 0; i < cv.constraints.size(); ++i) {
        const double shifted = std::max(0.0, lambda(i) + mu * cv.constraints(i));
        m += (shifted * shifted - lambda(i) * lambda(i)) / (2.0 * mu);
      }
      return m;
    };
    BfgsResult inner = minimize_bfgs(merit, x, config.inner, h_inv.size() ? &h_inv : nullptr);
    // Penalty terms grow with mu, so shrink the carried curvature inverse.
    h_inv = std::move(inner.inverse_hessian) / config.penalty_growth;
    evals += inner.evaluations;
    x = inner.x;
    v = fn(x);
    ++evals;
    out.rounds = round + 1;
    double violation = 0.0;
    double complementarity = 0.0;
    for (Eigen::Index i = 0; i < v.constraints.size(); ++i) {
      lambda(i) = std::max(0.0, lambda(i) + mu * v.constraints(i));
      violation = std::max(violation, v.constraints(i));
      complementarity = std::max(complementarity, std::abs(std::min(-v.constraints(i), lambda(i))));
    }
    if (violation <= config.feasibility_tol && complementarity <= std::sqrt(config.feasibility_tol)) {
      break;
    }
    mu *= config.penalty_growth;
  }
  out.x = x;
  out.objective = v.objective;
  out.max_violation = v.constraints.size() ? std::max(0.0, v.constraints.maxCoeff()) : 0.0;
  out.evaluations = evals;
  return out;
}

}  // namespace hipp
