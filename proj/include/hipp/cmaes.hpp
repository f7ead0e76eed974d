#pragma once

// (mu/mu_w, lambda) covariance matrix adaptation evolution strategy with
// cumulative step-size adaptation and rank-one plus rank-mu updates.

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace hipp {

struct CmaesConfig {
  int lambda = 0;         // 0: 4 + floor(3 ln n)
  double sigma0 = 0.3;
  int max_iters = 1000;
  long max_evals = 0;     // 0: unlimited
  double tol_x = 1e-12;   // stop when sigma * max sqrt(C_ii) falls below this
  double tol_fun = -std::numeric_limits<double>::infinity();  // stop once best f <= tol_fun
  std::uint64_t seed = 0;

  /// Throws Error(Validation) on lambda in [1, 3], sigma0 <= 0 or a bad iteration cap.
  void validate() const;
};

struct CmaesResult {
  Eigen::VectorXd x;        // best point ever evaluated
  double value = 0.0;
  int iterations = 0;
  long evaluations = 0;
  std::vector<double> history;  // best-so-far value after each generation
  double final_sigma = 0.0;
  double min_eigenvalue = 0.0;  // smallest eigenvalue of C over the run
};

/// Minimises f from x0. Non-finite values count as +inf. Deterministic given seed.
CmaesResult cmaes_minimize(const std::function<double(const Eigen::VectorXd&)>& f,
                           const Eigen::VectorXd& x0, const CmaesConfig& config);

}  // namespace hipp
