#include "hipp/refine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "hipp/error.hpp"
#include "hipp/optimize.hpp"

namespace hipp {

void RefineConfig::validate() const {
  std::ostringstream err;
  if (degree < 1) err << "degree must be >= 1; ";
  if (n_ctrl < degree + 1 || n_ctrl < 2) err << "n_ctrl must be >= degree + 1; ";
  if (n_env < 2 || n_obs < 2) err << "n_env and n_obs must be >= 2; ";
  if (m_quad < 16) err << "m_quad must be >= 16; ";
  if (!(length_guard >= 1.0)) err << "length_guard must be >= 1; ";
  if (!(clearance >= 0.0)) err << "clearance must be >= 0; ";
  if (prune_margin && !(*prune_margin >= 0.0)) err << "prune_margin must be >= 0; ";
  if (al_rounds < 1 || inner_iters < 1) err << "al_rounds and inner_iters must be >= 1; ";
  if (!(penalty_growth > 1.0)) err << "penalty_growth must be > 1; ";
  if (!(inner_tol > 0.0) || !(fd_step > 0.0)) err << "tolerances must be > 0; ";
  if (exchange_rounds < 0) err << "exchange_rounds must be >= 0; ";
  if (perturbed_starts < 0 || !(perturb_scale >= 0.0)) err << "multi-start settings invalid; ";
  if (validate_intervals < 2) err << "validate_intervals must be >= 2; ";
  if (!err.str().empty()) throw Error(ErrorKind::Validation, "refine config: " + trim_separators(err.str()));
}

double segment_objective(const SplineSegment& seg, PointSpan tests, const KernelParams& params,
                         int n, PointSpan prior) {
  PointList x = seg.sample(n);
  x.insert(x.end(), prior.begin(), prior.end());
  return posterior_cov_trace(tests, x, params);
}

namespace {

std::vector<double> interval_parameters(int intervals) {
  std::vector<double> ts(intervals + 1);
  for (int i = 0; i <= intervals; ++i) ts[i] = static_cast<double>(i) / intervals;
  return ts;
}

double chord_sum(const PointList& pts) {
  double total = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) total += (pts[i] - pts[i - 1]).norm();
  return total;
}

// Positive amount by which a check misses feasibility.
double violation_of(const SegmentCheck& c, double length_budget, double clearance) {
  double v = std::max(0.0, clearance - c.min_obstacle_clearance);
  v = std::max(v, -c.min_workspace_clearance);
  if (!c.length_ok) v = std::max(v, c.guarded_length - length_budget);
  return v;
}

}  // namespace

SegmentCheck check_segment(const SplineSegment& seg, double length_budget,
                           const std::vector<Obstacle>& obstacles, const Rect& workspace,
                           const RefineConfig& config, int n_samples) {
  SegmentCheck c;
  PointList pts = seg.sample(
      basis_matrix(interval_parameters(config.validate_intervals), seg.degree(), seg.knots()));
  if (n_samples > 0) {
    const PointList meas = seg.sample(n_samples);
    pts.insert(pts.end(), meas.begin(), meas.end());
  }
  c.min_obstacle_clearance = std::numeric_limits<double>::infinity();
  c.min_workspace_clearance = std::numeric_limits<double>::infinity();
  for (const auto& p : pts) {
    c.min_workspace_clearance = std::min(c.min_workspace_clearance, workspace_signed_distance(p, workspace));
    for (std::size_t o = 0; o < obstacles.size(); ++o) {
      const double d = signed_distance(p, obstacles[o]);
      if (d < c.min_obstacle_clearance) {
        c.min_obstacle_clearance = d;
        c.worst_obstacle = static_cast<std::ptrdiff_t>(o);
      }
    }
  }
  c.length = segment_arc_length(seg, config.m_quad);
  c.guarded_length = config.length_guard * c.length;
  const double tol = 1e-12 * std::max(1.0, length_budget);
  // A monotone straight segment has an exact chord sum, so it needs no guard.
  c.length_ok = c.guarded_length <= length_budget ||
                (is_straight(seg) && c.length <= length_budget + tol);
  c.feasible = c.length_ok && c.min_obstacle_clearance >= config.clearance - 1e-9 &&
               c.min_workspace_clearance >= -1e-9;
  return c;
}

SplineSolution optimize_spline(const SplineProblem& problem, const SplineSegment& init,
                               const RefineConfig& config, std::uint64_t seed) {
  const double chord = (problem.goal - problem.start).norm();
  const double scale = std::max(chord, problem.params.lengthscale);
  const double slack = std::max(0.0, problem.length_budget - chord);
  const double margin = 1e-6 * scale;
  const int degree = init.degree();

  const Eigen::MatrixXd meas_basis =
      basis_matrix(uniform_parameters(problem.n_samples), degree, init.knots());
  const Eigen::MatrixXd quad_basis =
      basis_matrix(interval_parameters(config.m_quad), degree, init.knots());
  const std::vector<double> env_ts = uniform_parameters(config.n_env);
  const std::vector<double> obs_ts = uniform_parameters(config.n_obs);

  // Constraint samples: the uniform sets plus parameters added where the dense
  // check found a violation between them.
  Eigen::MatrixXd env_basis;
  Eigen::MatrixXd obs_basis;
  Eigen::Index n_constraints = 0;
  auto set_samples = [&](const std::vector<double>& extra) {
    std::vector<double> e = env_ts;
    std::vector<double> o = obs_ts;
    e.insert(e.end(), extra.begin(), extra.end());
    o.insert(o.end(), extra.begin(), extra.end());
    env_basis = basis_matrix(e, degree, init.knots());
    obs_basis = basis_matrix(o, degree, init.knots());
    n_constraints = 1 + env_basis.rows() + obs_basis.rows() * static_cast<Eigen::Index>(problem.obstacles.size());
  };

  std::vector<PreparedObstacle> prepared;
  for (const auto& o : problem.obstacles) prepared.emplace_back(o);

  SplineSegment work = init;
  PointList meas;
  double inflate = 0.0;  // extra obstacle clearance after failed dense checks
  auto evaluate = [&](const Eigen::VectorXd& x) {
    work.set_interior(x);
    ConstrainedValue out;
    meas = work.sample(meas_basis);
    meas.insert(meas.end(), problem.prior.begin(), problem.prior.end());
    out.objective = posterior_cov_trace(problem.tests, meas, problem.params);
    out.constraints.resize(n_constraints);
    Eigen::Index k = 0;
    out.constraints(k++) = config.length_guard * chord_sum(work.sample(quad_basis)) -
                           (problem.length_budget - margin);
    for (const auto& p : work.sample(env_basis)) {
      out.constraints(k++) = margin - workspace_signed_distance(p, problem.workspace);
    }
    const PointList obs_pts = work.sample(obs_basis);
    for (const auto& o : prepared) {
      for (const auto& p : obs_pts) {
        out.constraints(k++) = config.clearance + inflate + margin - o.signed_distance(p);
      }
    }
    return out;
  };

  // Parameters of the deepest point of every run of violating dense samples.
  std::vector<double> dense_ts = interval_parameters(config.validate_intervals);
  for (double t : uniform_parameters(problem.n_samples)) dense_ts.push_back(t);
  std::sort(dense_ts.begin(), dense_ts.end());
  const Eigen::MatrixXd dense_basis = basis_matrix(dense_ts, degree, init.knots());
  auto violating_parameters = [&](const SplineSegment& seg) {
    std::vector<double> found;
    const PointList pts = seg.sample(dense_basis);
    double worst = 0.0;
    double worst_t = 0.0;
    bool in_run = false;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      double v = -workspace_signed_distance(pts[i], problem.workspace);
      for (const auto& o : prepared) v = std::max(v, config.clearance - o.signed_distance(pts[i]));
      if (v > -margin) {
        if (!in_run || v > worst) {
          worst = v;
          worst_t = dense_ts[i];
        }
        in_run = true;
      } else if (in_run) {
        found.push_back(worst_t);
        in_run = false;
      }
    }
    if (in_run) found.push_back(worst_t);
    return found;
  };

  AugLagConfig al;
  al.rounds = config.al_rounds;
  al.penalty_growth = config.penalty_growth;
  al.penalty = std::max(1.0, static_cast<double>(problem.tests.size())) *
               problem.params.signal_variance / (problem.params.lengthscale * scale);
  al.feasibility_tol = 1e-7 * scale;
  al.inner.max_iters = config.inner_iters;
  al.inner.grad_tol = config.inner_tol * al.penalty * scale;
  al.inner.fd_step = config.fd_step * scale;
  al.inner.step_tol = 1e-12 * scale;

  SplineSolution best;
  best.spline = init;
  const SegmentCheck init_check =
      check_segment(init, problem.length_budget, problem.obstacles, problem.workspace, config,
                      problem.n_samples);
  const bool init_feasible = init_check.feasible;
  best.diagnostics.initial_objective =
      posterior_cov_trace(problem.tests, [&] {
        PointList x = init.sample(meas_basis);
        x.insert(x.end(), problem.prior.begin(), problem.prior.end());
        return x;
      }(), problem.params);
  best.diagnostics.objective = best.diagnostics.initial_objective;
  best.diagnostics.feasible = init_feasible;
  best.diagnostics.check = init_check;
  best.diagnostics.max_violation =
      violation_of(init_check, problem.length_budget, config.clearance);
  best.diagnostics.kept_obstacles = problem.obstacles.size();

  // Any bent curve needs guard * length <= L_e - margin with length > chord.
  if (problem.length_budget <= config.length_guard * chord + margin) return best;

  std::vector<Eigen::VectorXd> starts{init.interior()};
  if (slack > 0.0 && config.perturb_scale > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, config.perturb_scale * slack);
    for (int s = 0; s < config.perturbed_starts; ++s) {
      Eigen::VectorXd x = starts.front();
      for (Eigen::Index i = 0; i < x.size(); ++i) x(i) += normal(rng);
      starts.push_back(x);
    }
  }

  const Eigen::VectorXd x_init = init.interior();
  int evaluations = 0;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    std::vector<double> extra;
    set_samples(extra);
    inflate = 0.0;
    AugLagResult r = minimize_augmented_lagrangian(evaluate, starts[s], al);
    evaluations += r.evaluations;
    SplineSegment cand = init;
    cand.set_interior(r.x);
    SegmentCheck check = check_segment(cand, problem.length_budget, problem.obstacles,
                                       problem.workspace, config, problem.n_samples);
    for (int pass = 0; pass < config.exchange_rounds && !check.feasible; ++pass) {
      const std::vector<double> add = violating_parameters(cand);
      if (add.empty()) break;
      extra.insert(extra.end(), add.begin(), add.end());
      set_samples(extra);
      inflate += std::max(0.0, config.clearance - check.min_obstacle_clearance);
      r = minimize_augmented_lagrangian(evaluate, r.x, al);
      evaluations += r.evaluations;
      cand.set_interior(r.x);
      check = check_segment(cand, problem.length_budget, problem.obstacles, problem.workspace,
                            config, problem.n_samples);
    }
    if (!check.feasible && init_feasible) {
      // Pull back toward the feasible straight initialisation.
      double lo = 0.0;
      double hi = 1.0;
      for (int it = 0; it < 30; ++it) {
        const double mid = 0.5 * (lo + hi);
        SplineSegment trial = init;
        trial.set_interior(r.x + mid * (x_init - r.x));
        if (check_segment(trial, problem.length_budget, problem.obstacles, problem.workspace, config,
                      problem.n_samples)
                .feasible) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      cand.set_interior(r.x + hi * (x_init - r.x));
      if (hi == 1.0) cand = init;
      check = check_segment(cand, problem.length_budget, problem.obstacles, problem.workspace, config,
                      problem.n_samples);
    }
    const double obj = segment_objective(cand, problem.tests, problem.params, problem.n_samples,
                                         problem.prior);
    const double viol = violation_of(check, problem.length_budget, config.clearance);
    bool take = false;
    if (check.feasible) {
      take = !best.diagnostics.feasible || obj < best.diagnostics.objective;
    } else if (!best.diagnostics.feasible) {
      take = viol < best.diagnostics.max_violation;
    }
    if (take) {
      best.spline = cand;
      best.diagnostics.objective = obj;
      best.diagnostics.feasible = check.feasible;
      best.diagnostics.check = check;
      best.diagnostics.max_violation = viol;
      best.diagnostics.best_start = static_cast<int>(s);
    }
  }
  best.diagnostics.evaluations = evaluations;
  return best;
}

SplineSolution refine_segment(const Point& u, const Point& v, double length_budget,
                              PointSpan tests, const Environment& env, const KernelParams& params,
                              int n_samples, const RefineConfig& config, std::uint64_t seed,
                              PointSpan prior) {
  config.validate();
  if (n_samples < 2) throw Error(ErrorKind::Contract, "refine_segment: need at least 2 samples");
  const double chord = (v - u).norm();
  if (!(length_budget >= chord - 1e-12 * std::max(1.0, chord))) {
    std::ostringstream msg;
    msg << "refine_segment: budget " << length_budget << " below edge length " << chord;
    throw Error(ErrorKind::Contract, msg.str());
  }
  const double margin = config.prune_margin.value_or(1e-3 * params.lengthscale) + 2.0 * config.clearance;
  const auto kept = kept_obstacle_indices(env, u, v, std::max(length_budget, chord), margin);

  SplineProblem problem;
  problem.start = u;
  problem.goal = v;
  problem.length_budget = std::max(length_budget, chord);
  problem.tests.assign(tests.begin(), tests.end());
  problem.params = params;
  for (auto i : kept) problem.obstacles.push_back(env.obstacles[i]);
  problem.workspace = env.workspace;
  problem.n_samples = n_samples;
  problem.prior.assign(prior.begin(), prior.end());

  const SplineSegment init = SplineSegment::straight(u, v, config.n_ctrl, config.degree);
  const SegmentCheck c = check_segment(init, problem.length_budget, problem.obstacles, env.workspace, config, n_samples);
  if (!c.feasible) {
    std::ostringstream msg;
    msg << "refine_segment: straight edge is infeasible";
    if (c.worst_obstacle >= 0 && c.min_obstacle_clearance < config.clearance - 1e-9) {
      const std::size_t idx = kept[static_cast<std::size_t>(c.worst_obstacle)];
      msg << "; violates clearance of obstacle " << idx << " " << describe(env.obstacles[idx])
          << " (signed distance " << c.min_obstacle_clearance << ")";
    }
    if (c.min_workspace_clearance < -1e-9) msg << "; leaves the workspace";
    throw Error(ErrorKind::Validation, msg.str());
  }

  SplineSolution sol = optimize_spline(problem, init, config, seed);
  sol.diagnostics.kept_obstacles = kept.size();
  sol.diagnostics.pruned_obstacles = env.obstacles.size() - kept.size();
  return sol;
}

}  // namespace hipp
