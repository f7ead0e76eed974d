#include "hipp/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "hipp/error.hpp"

namespace hipp {

AllocationProblem AllocationProblem::make(std::vector<std::pair<Point, Point>> edges,
                                          PointList tests, double budget, double r_kernel,
                                          double alpha) {
  if (!(alpha > 0.0)) throw Error(ErrorKind::Validation, "allocation: alpha must be > 0");
  if (!(r_kernel >= 0.0)) throw Error(ErrorKind::Validation, "allocation: r_kernel must be >= 0");
  AllocationProblem p;
  p.edges = std::move(edges);
  p.tests = std::move(tests);
  p.budget = budget;
  p.r_kernel = r_kernel;
  p.alpha = alpha;
  p.focal.resize(static_cast<Eigen::Index>(p.edges.size()),
                 static_cast<Eigen::Index>(p.tests.size()));
  for (std::size_t e = 0; e < p.edges.size(); ++e) {
    for (std::size_t j = 0; j < p.tests.size(); ++j) {
      p.focal(e, j) = (p.tests[j] - p.edges[e].first).norm() + (p.tests[j] - p.edges[e].second).norm();
    }
  }
  const double geometric = p.geometric_lengths().sum();
  if (geometric > budget + 1e-9 * std::max(1.0, budget)) {
    std::ostringstream msg;
    msg << "allocation: edge lengths " << geometric << " exceed the budget " << budget;
    throw InfeasibleError(msg.str(), geometric, geometric - budget);
  }
  return p;
}

Eigen::VectorXd AllocationProblem::geometric_lengths() const {
  Eigen::VectorXd len(static_cast<Eigen::Index>(edges.size()));
  for (std::size_t e = 0; e < edges.size(); ++e) {
    len(e) = (edges[e].second - edges[e].first).norm();
  }
  return len;
}

double coverage_sigmoid(double length, double focal_dist, double r_kernel, double alpha) {
  const double arg = std::clamp(alpha * (focal_dist - length - 2.0 * r_kernel), -500.0, 500.0);
  return 1.0 / (1.0 + std::exp(arg));
}

double coverage_union(std::span<const double> s) {
  double miss = 1.0;
  for (double v : s) miss *= (1.0 - v);
  return 1.0 - miss;
}

ObjectiveValue allocation_objective(const Eigen::VectorXd& lengths, const AllocationProblem& p) {
  const auto ne = static_cast<Eigen::Index>(p.num_edges());
  ObjectiveValue out;
  out.gradient = Eigen::VectorXd::Zero(ne);
  std::vector<double> s(ne), prefix(ne + 1), suffix(ne + 1);
  for (std::size_t j = 0; j < p.tests.size(); ++j) {
    for (Eigen::Index e = 0; e < ne; ++e) {
      s[e] = coverage_sigmoid(lengths(e), p.focal(e, j), p.r_kernel, p.alpha);
    }
    out.value += coverage_union(s);
    // Products over the other edges without dividing by a possibly zero factor.
    prefix[0] = 1.0;
    for (Eigen::Index e = 0; e < ne; ++e) prefix[e + 1] = prefix[e] * (1.0 - s[e]);
    suffix[ne] = 1.0;
    for (Eigen::Index e = ne - 1; e >= 0; --e) suffix[e] = suffix[e + 1] * (1.0 - s[e]);
    for (Eigen::Index e = 0; e < ne; ++e) {
      out.gradient(e) += prefix[e] * suffix[e + 1] * p.alpha * s[e] * (1.0 - s[e]);
    }
  }
  return out;
}

Eigen::VectorXd project_feasible(const Eigen::VectorXd& lengths, const Eigen::VectorXd& lower,
                                 double budget) {
  Eigen::VectorXd clipped = lengths.cwiseMax(lower);
  if (clipped.sum() <= budget) return clipped;

  // Find theta > 0 with sum max(L - theta, lower) = budget by walking the
  // sorted breakpoints L_i - lower_i.
  const auto n = lengths.size();
  std::vector<Eigen::Index> active;
  double fixed = 0.0;
  double active_sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (lengths(i) > lower(i)) {
      active.push_back(i);
      active_sum += lengths(i);
    } else {
      fixed += lower(i);
    }
  }
  std::sort(active.begin(), active.end(), [&](Eigen::Index a, Eigen::Index b) {
    const double da = lengths(a) - lower(a);
    const double db = lengths(b) - lower(b);
    return da != db ? da < db : a < b;
  });
  double theta = 0.0;
  std::size_t k = 0;
  while (k < active.size()) {
    const double count = static_cast<double>(active.size() - k);
    theta = (active_sum + fixed - budget) / count;
    const Eigen::Index i = active[k];
    if (theta <= lengths(i) - lower(i)) break;
    active_sum -= lengths(i);
    fixed += lower(i);
    ++k;
  }
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) out(i) = std::max(lengths(i) - theta, lower(i));
  return out;
}

Eigen::VectorXd initial_allocation(const AllocationProblem& p) {
  const Eigen::VectorXd len = p.geometric_lengths();
  const double total = len.sum();
  const double slack = std::max(0.0, p.budget - total);
  if (total <= 0.0) {
    return len.array() + slack / static_cast<double>(std::max<Eigen::Index>(1, len.size()));
  }
  return len + slack * len / total;
}

namespace {

struct AscentResult {
  Eigen::VectorXd lengths;
  double value = 0.0;
  int iterations = 0;
  std::vector<double> history;
  std::vector<Eigen::VectorXd> iterates;
};

AscentResult ascend(const AllocationProblem& p, Eigen::VectorXd x, const AllocationConfig& cfg) {
  const Eigen::VectorXd lower = p.geometric_lengths();
  AscentResult out;
  x = project_feasible(x, lower, p.budget);
  ObjectiveValue f = allocation_objective(x, p);
  out.history.push_back(f.value);
  if (cfg.record_iterates) out.iterates.push_back(x);
  double step = 0.0;
  for (int it = 0; it < cfg.max_iters; ++it) {
    const double gnorm = (project_feasible(x + f.gradient, lower, p.budget) - x).norm();
    if (gnorm < cfg.tol) break;
    if (step == 0.0) {
      const double scale = std::max(p.budget - lower.sum(), 1e-12);
      step = scale / std::max(f.gradient.cwiseAbs().maxCoeff(), 1e-300);
    } else {
      step *= 2.0;
    }
    bool accepted = false;
    Eigen::VectorXd trial;
    ObjectiveValue ft;
    while (step > 1e-20) {
      trial = project_feasible(x + step * f.gradient, lower, p.budget);
      ft = allocation_objective(trial, p);
      if (ft.value >= f.value + cfg.armijo_c * f.gradient.dot(trial - x)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    const bool stalled = (trial - x).norm() < cfg.tol * 1e-3;
    x = trial;
    f = ft;
    out.iterations = it + 1;
    out.history.push_back(f.value);
    if (cfg.record_iterates) out.iterates.push_back(x);
    if (stalled) break;
  }
  out.lengths = x;
  out.value = f.value;
  return out;
}

}  // namespace

Allocation solve_allocation(const AllocationProblem& p, const AllocationConfig& config) {
  Allocation best;
  if (p.num_edges() == 0) {
    best.lengths = Eigen::VectorXd();
    return best;
  }
  const Eigen::VectorXd lower = p.geometric_lengths();
  const double slack = p.budget - lower.sum();
  const Eigen::VectorXd base = initial_allocation(p);

  std::vector<Eigen::VectorXd> starts{base};
  if (slack > 0.0) {
    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const Eigen::VectorXd share = (base - lower) / slack;
    for (int s = 0; s < config.perturbed_starts; ++s) {
      Eigen::VectorXd w(lower.size());
      for (Eigen::Index i = 0; i < w.size(); ++i) {
        w(i) = std::max(share(i), 1e-3) * std::exp(normal(rng));
      }
      starts.push_back(lower + slack * w / w.sum());
    }
  }

  bool have = false;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    AscentResult r = ascend(p, starts[s], config);
    if (!have || r.value > best.coverage) {
      best.lengths = r.lengths;
      best.coverage = r.value;
      best.iterations = r.iterations;
      best.best_start = static_cast<int>(s);
      best.objective_history = std::move(r.history);
      best.iterates = std::move(r.iterates);
      have = true;
    }
  }
  return best;
}

}  // namespace hipp
