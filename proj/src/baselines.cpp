#include "hipp/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "hipp/error.hpp"

namespace hipp {

RefineConfig ContinuousConfig::default_gradient_config() {
  RefineConfig c;
  c.n_ctrl = 14;
  c.n_env = 128;
  c.n_obs = 128;
  c.perturbed_starts = 0;
  c.validate_intervals = 1024;
  return c;
}

void ContinuousConfig::validate() const {
  std::ostringstream err;
  if (degree < 1 || n_ctrl < degree + 1) err << "n_ctrl must be >= degree + 1; ";
  if (!(sigma0_scale > 0.0)) err << "sigma0_scale must be > 0; ";
  if (!(budget_penalty >= 0.0) || !(obstacle_penalty >= 0.0) || !(workspace_penalty >= 0.0)) {
    err << "penalty weights must be >= 0; ";
  }
  if (check_samples < 2) err << "check_samples must be >= 2; ";
  if (m_quad < 16) err << "m_quad must be >= 16; ";
  if (!(clearance >= 0.0)) err << "clearance must be >= 0; ";
  if (!err.str().empty()) throw Error(ErrorKind::Validation, "continuous config: " + trim_separators(err.str()));
  cmaes.validate();
  gradient.validate();
}

namespace {

BaselinePlan finish_spline_plan(const Scenario& sc, const SplineSegment& spline, double clearance,
                                int m_quad) {
  BaselinePlan out;
  out.trajectory.segments = {spline};
  out.trajectory.measurement_t = {uniform_parameters(sc.n_measurements)};
  out.trajectory.measurement_points = {spline.sample(sc.n_measurements)};
  out.objective = posterior_cov_trace(sc.test_points, out.trajectory.measurements(), sc.kernel);
  out.length = segment_arc_length(spline, m_quad);
  out.check = validate_trajectory(out.trajectory, sc.env, sc.start_point(), sc.goal_point(),
                                  sc.budget, clearance);
  return out;
}

}  // namespace

BaselinePlan plan_continuous_cmaes(const Scenario& sc, const ContinuousConfig& config,
                                   std::uint64_t seed) {
  config.validate();
  if (sc.n_measurements < 2) throw Error(ErrorKind::Contract, "cmaes baseline: need >= 2 measurements");
  const SplineSegment init =
      SplineSegment::straight(sc.start_point(), sc.goal_point(), config.n_ctrl, config.degree);
  const Eigen::MatrixXd meas_basis =
      basis_matrix(uniform_parameters(sc.n_measurements), config.degree, init.knots());
  const Eigen::MatrixXd check_basis =
      basis_matrix(uniform_parameters(config.check_samples), config.degree, init.knots());
  std::vector<double> quad_t(config.m_quad + 1);
  for (int i = 0; i <= config.m_quad; ++i) quad_t[i] = static_cast<double>(i) / config.m_quad;
  const Eigen::MatrixXd quad_basis = basis_matrix(quad_t, config.degree, init.knots());
  const double s2 = sc.kernel.signal_variance;

  std::vector<PreparedObstacle> prepared;
  for (const auto& o : sc.env.obstacles) prepared.emplace_back(o);

  SplineSegment work = init;
  auto fitness = [&](const Eigen::VectorXd& x) {
    work.set_interior(x);
    double value = posterior_cov_trace(sc.test_points, work.sample(meas_basis), sc.kernel);
    const double over = std::max(0.0, arc_length(work.sample(quad_basis)) - sc.budget);
    value += config.budget_penalty * s2 * over * over;
    double obs = 0.0;
    double ws = 0.0;
    for (const auto& p : work.sample(check_basis)) {
      const double out_ws = std::max(0.0, -workspace_signed_distance(p, sc.env.workspace));
      ws += out_ws * out_ws;
      for (const auto& o : prepared) {
        const double pen = std::max(0.0, config.clearance - o.signed_distance(p));
        obs += pen * pen;
      }
    }
    return value + config.obstacle_penalty * s2 * obs + config.workspace_penalty * s2 * ws;
  };

  CmaesConfig cma = config.cmaes;
  cma.sigma0 = config.sigma0_scale * sc.env.workspace.diagonal();
  cma.seed = seed;
  const CmaesResult r = cmaes_minimize(fitness, init.interior(), cma);

  SplineSegment best = init;
  best.set_interior(r.x);
  BaselinePlan out = finish_spline_plan(sc, best, config.clearance, config.m_quad);
  out.evaluations = r.evaluations;
  out.history = r.history;
  return out;
}

BaselinePlan plan_continuous_gradient(const Scenario& sc, const ContinuousConfig& config,
                                      std::uint64_t seed) {
  config.validate();
  if (sc.n_measurements < 2) throw Error(ErrorKind::Contract, "gradient baseline: need >= 2 measurements");
  const RefineConfig& rc = config.gradient;
  const Point& s = sc.start_point();
  const Point& g = sc.goal_point();
  const double margin = rc.prune_margin.value_or(1e-3 * sc.kernel.lengthscale) + 2.0 * rc.clearance;

  SplineProblem problem;
  problem.start = s;
  problem.goal = g;
  problem.length_budget = sc.budget;
  problem.tests = sc.test_points;
  problem.params = sc.kernel;
  problem.obstacles = prune_obstacles(sc.env, s, g, sc.budget, margin);
  problem.workspace = sc.env.workspace;
  problem.n_samples = sc.n_measurements;

  const SplineSegment init = SplineSegment::straight(s, g, rc.n_ctrl, rc.degree);
  const SplineSolution sol = optimize_spline(problem, init, rc, seed);
  BaselinePlan out = finish_spline_plan(sc, sol.spline, rc.clearance, rc.m_quad);
  out.evaluations = sol.diagnostics.evaluations;
  return out;
}

Trajectory graph_path_trajectory(const InformativeGraph& graph, const GraphPath& path, int n_total) {
  Trajectory traj;
  const auto& vs = path.vertices;
  if (vs.size() < 2) throw Error(ErrorKind::Contract, "graph trajectory: path needs at least one edge");
  const std::size_t n_seg = vs.size() - 1;
  std::vector<std::vector<double>> ts(n_seg);
  std::set<std::size_t> seen;
  for (std::size_t k = 0; k < vs.size(); ++k) {
    if (!seen.insert(vs[k]).second) continue;
    if (k < n_seg) {
      ts[k].push_back(0.0);
    } else {
      ts[n_seg - 1].push_back(1.0);
    }
  }
  const int distinct = static_cast<int>(seen.size());
  if (n_total < distinct) {
    std::ostringstream msg;
    msg << "graph trajectory: " << n_total << " measurements cannot cover " << distinct
        << " distinct path vertices";
    throw Error(ErrorKind::Contract, msg.str());
  }

  std::vector<double> seg_len(n_seg);
  double total = 0.0;
  for (std::size_t e = 0; e < n_seg; ++e) {
    seg_len[e] = (graph.vertices()[vs[e + 1]] - graph.vertices()[vs[e]]).norm();
    total += seg_len[e];
  }
  const int padding = n_total - distinct;
  std::size_t e = 0;
  double before = 0.0;  // path length before segment e
  for (int i = 0; i < padding; ++i) {
    const double s = (i + 0.5) / padding * total;
    while (e + 1 < n_seg && s > before + seg_len[e]) {
      before += seg_len[e];
      ++e;
    }
    ts[e].push_back(std::clamp((s - before) / seg_len[e], 0.0, 1.0));
  }

  for (std::size_t k = 0; k < n_seg; ++k) {
    const Point& a = graph.vertices()[vs[k]];
    const Point& b = graph.vertices()[vs[k + 1]];
    traj.segments.emplace_back(PointList{a, b}, 1);
    std::stable_sort(ts[k].begin(), ts[k].end());
    PointList pts;
    for (double t : ts[k]) {
      if (t == 0.0) {
        pts.push_back(a);
      } else if (t == 1.0) {
        pts.push_back(b);
      } else {
        pts.push_back(a + t * (b - a));
      }
    }
    traj.measurement_t.push_back(ts[k]);
    traj.measurement_points.push_back(std::move(pts));
  }
  return traj;
}

BaselinePlan plan_graph_only(const Scenario& sc, const GraphSearchConfig& search) {
  BaselinePlan out;
  out.graph = plan_graph_path(sc.graph, sc.start, sc.goal, sc.budget, sc.test_points, sc.kernel, search);
  out.trajectory = graph_path_trajectory(sc.graph, out.graph->path, sc.n_measurements);
  out.objective = posterior_cov_trace(sc.test_points, out.trajectory.measurements(), sc.kernel);
  out.length = out.graph->path.length;
  out.check = validate_trajectory(out.trajectory, sc.env, sc.start_point(), sc.goal_point(), sc.budget);
  return out;
}

}  // namespace hipp
