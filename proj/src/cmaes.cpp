#include "hipp/cmaes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "hipp/error.hpp"

namespace hipp {

void CmaesConfig::validate() const {
  if (lambda != 0 && lambda < 4) throw Error(ErrorKind::Validation, "cmaes: lambda must be >= 4");
  if (!(sigma0 > 0.0)) throw Error(ErrorKind::Validation, "cmaes: sigma0 must be > 0");
  if (max_iters < 1) throw Error(ErrorKind::Validation, "cmaes: max_iters must be >= 1");
  if (max_evals < 0) throw Error(ErrorKind::Validation, "cmaes: max_evals must be >= 0");
}

CmaesResult cmaes_minimize(const std::function<double(const Eigen::VectorXd&)>& f,
                           const Eigen::VectorXd& x0, const CmaesConfig& config) {
  config.validate();
  const Eigen::Index n = x0.size();
  if (n < 1) throw Error(ErrorKind::Contract, "cmaes: dimension must be >= 1");
  const double nd = static_cast<double>(n);
  const int lambda = config.lambda > 0 ? config.lambda : 4 + static_cast<int>(std::floor(3.0 * std::log(nd)));
  const int mu = lambda / 2;

  Eigen::VectorXd w(mu);
  for (int i = 0; i < mu; ++i) w(i) = std::log(mu + 0.5) - std::log(i + 1.0);
  w /= w.sum();
  const double mu_eff = 1.0 / w.squaredNorm();

  const double c_sigma = (mu_eff + 2.0) / (nd + mu_eff + 5.0);
  const double d_sigma = 1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff - 1.0) / (nd + 1.0)) - 1.0) + c_sigma;
  const double c_c = (4.0 + mu_eff / nd) / (nd + 4.0 + 2.0 * mu_eff / nd);
  const double c_1 = 2.0 / ((nd + 1.3) * (nd + 1.3) + mu_eff);
  const double c_mu = std::min(1.0 - c_1, 2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((nd + 2.0) * (nd + 2.0) + mu_eff));
  const double chi_n = std::sqrt(nd) * (1.0 - 1.0 / (4.0 * nd) + 1.0 / (21.0 * nd * nd));

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  Eigen::VectorXd mean = x0;
  double sigma = config.sigma0;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd basis = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd diag = Eigen::VectorXd::Ones(n);  // sqrt of eigenvalues
  Eigen::VectorXd p_sigma = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd p_c = Eigen::VectorXd::Zero(n);

  CmaesResult out;
  out.x = x0;
  out.value = std::numeric_limits<double>::infinity();
  out.min_eigenvalue = 1.0;
  auto evaluate = [&](const Eigen::VectorXd& x) {
    ++out.evaluations;
    const double v = f(x);
    const double fv = std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    if (fv < out.value) {
      out.value = fv;
      out.x = x;
    }
    return fv;
  };

  std::vector<Eigen::VectorXd> ys(lambda), xs(lambda);
  std::vector<double> fitness(lambda);
  std::vector<int> order(lambda);
  for (int gen = 0; gen < config.max_iters; ++gen) {
    for (int k = 0; k < lambda; ++k) {
      Eigen::VectorXd z(n);
      for (Eigen::Index i = 0; i < n; ++i) z(i) = normal(rng);
      ys[k] = basis * diag.cwiseProduct(z);
      xs[k] = mean + sigma * ys[k];
    }
    for (int k = 0; k < lambda; ++k) fitness[k] = evaluate(xs[k]);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return fitness[a] < fitness[b]; });

    Eigen::VectorXd y_w = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < mu; ++i) y_w += w(i) * ys[order[i]];
    mean += sigma * y_w;

    // C^{-1/2} y_w = B D^{-1} B^T y_w
    const Eigen::VectorXd c_inv_sqrt_y = basis * (basis.transpose() * y_w).cwiseQuotient(diag);
    p_sigma = (1.0 - c_sigma) * p_sigma + std::sqrt(c_sigma * (2.0 - c_sigma) * mu_eff) * c_inv_sqrt_y;
    const double ps_norm = p_sigma.norm();
    const bool h_sigma = ps_norm / std::sqrt(1.0 - std::pow(1.0 - c_sigma, 2.0 * (gen + 1))) <
                         (1.4 + 2.0 / (nd + 1.0)) * chi_n;
    p_c = (1.0 - c_c) * p_c + (h_sigma ? std::sqrt(c_c * (2.0 - c_c) * mu_eff) : 0.0) * y_w;

    Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < mu; ++i) rank_mu += w(i) * ys[order[i]] * ys[order[i]].transpose();
    const double delta_h = h_sigma ? 0.0 : c_c * (2.0 - c_c);
    cov = (1.0 - c_1 - c_mu) * cov + c_1 * (p_c * p_c.transpose() + delta_h * cov) + c_mu * rank_mu;
    cov = 0.5 * (cov + cov.transpose());

    sigma *= std::exp((c_sigma / d_sigma) * (ps_norm / chi_n - 1.0));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    Eigen::VectorXd evals = eig.eigenvalues();
    const double floor = std::max(evals.maxCoeff(), 1e-300) * 1e-14;
    out.min_eigenvalue = std::min(out.min_eigenvalue, evals.minCoeff());
    if (evals.minCoeff() < floor) {
      evals = evals.cwiseMax(floor);
      cov = eig.eigenvectors() * evals.asDiagonal() * eig.eigenvectors().transpose();
    }
    basis = eig.eigenvectors();
    diag = evals.cwiseSqrt();

    out.iterations = gen + 1;
    out.history.push_back(out.value);
    if (out.value <= config.tol_fun) break;
    if (config.max_evals > 0 && out.evaluations >= config.max_evals) break;
    if (sigma * std::sqrt(cov.diagonal().maxCoeff()) < config.tol_x) break;
  }
  out.final_sigma = sigma;
  return out;
}

}  // namespace hipp
