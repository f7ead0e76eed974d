#include "hipp/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <sstream>

#include "hipp/baselines.hpp"
#include "hipp/error.hpp"
#include "hipp/field.hpp"
#include "hipp/hierarchical.hpp"
#include "hipp/io.hpp"
#include "hipp/render.hpp"

namespace hipp {

namespace {

using Json = nlohmann::json;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<EdgeAllocation> edge_allocations(const Scenario& sc, const GraphPath& path,
                                             const std::vector<double>& lengths) {
  std::vector<EdgeAllocation> out;
  const auto& vs = sc.graph.vertices();
  for (std::size_t k = 0; k + 1 < path.vertices.size(); ++k) {
    const std::size_t a = path.vertices[k];
    const std::size_t b = path.vertices[k + 1];
    out.push_back({a, b, (vs[b] - vs[a]).norm(), lengths[k]});
  }
  return out;
}

std::vector<Ellipse> allocation_ellipses(const Scenario& sc, const std::vector<EdgeAllocation>& allocs) {
  std::vector<Ellipse> out;
  const auto& vs = sc.graph.vertices();
  for (const auto& a : allocs) {
    out.emplace_back(vs[a.a], vs[a.b], std::max(a.allocated, a.geometric));
  }
  return out;
}

// Objective, length, feasibility and RMSE from the trajectory alone.
void score(const Scenario& sc, const PlannerConfig& config, double clearance, PlanOutput& out) {
  PlanReport& r = out.report;
  const PointList meas = out.trajectory.measurements();
  r.objective = posterior_cov_trace(sc.test_points, meas, sc.kernel);
  const TrajectoryCheck check = validate_trajectory(out.trajectory, sc.env, sc.start_point(),
                                                    sc.goal_point(), sc.budget, clearance);
  r.total_length = check.length;
  r.feasible = check.feasible;
  r.reason = check.reason;
  r.n_measurements = static_cast<int>(meas.size());
  r.weighted_rmse = scenario_weighted_rmse(sc, meas);
  r.runtime = r.times.total();
  r.config = to_json(config);
}

Json allocations_json(const std::vector<EdgeAllocation>& allocs) {
  Json arr = Json::array();
  for (const auto& a : allocs) {
    arr.push_back({{"edge", {a.a, a.b}}, {"geometric_len", a.geometric}, {"allocated_len", a.allocated}});
  }
  return arr;
}

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

const char* to_string(PlannerKind kind) {
  switch (kind) {
    case PlannerKind::Hier: return "hier";
    case PlannerKind::Graph: return "graph";
    case PlannerKind::Cmaes: return "cmaes";
    case PlannerKind::Gradient: return "gradient";
  }
  return "unknown";
}

PlannerKind planner_from_string(const std::string& name) {
  for (auto k : {PlannerKind::Hier, PlannerKind::Graph, PlannerKind::Cmaes, PlannerKind::Gradient}) {
    if (name == to_string(k)) return k;
  }
  throw Error(ErrorKind::Validation,
              "unknown planner '" + name + "' (expected hier, graph, cmaes or gradient)");
}

std::optional<double> scenario_weighted_rmse(const Scenario& sc, PointSpan measurements) {
  if (!sc.truth_grid || measurements.empty()) return std::nullopt;
  const FieldGrid& truth = *sc.truth_grid;
  FieldGrid importance;
  if (sc.importance_grid && sc.importance_grid->same_shape(truth)) {
    importance = *sc.importance_grid;
  } else {
    importance = truth;
    importance.semantics = FieldSemantics::Importance;
    std::fill(importance.values.begin(), importance.values.end(), 1.0);
  }
  MeasurementSet data;
  data.locations.assign(measurements.begin(), measurements.end());
  for (const auto& p : measurements) data.values.push_back(truth.interpolate(p));
  const FieldGrid mean = posterior_mean_grid(truth, data, sc.kernel);
  return weighted_rmse(mean, truth, importance);
}

PlanOutput run_planner(const Scenario& sc, PlannerKind planner, const PlannerConfig& config,
                       std::uint64_t seed) {
  config.validate();
  PlanOutput out;
  out.report.planner = planner;
  out.report.seed = seed;
  double clearance = 0.0;
  switch (planner) {
    case PlannerKind::Hier: {
      HierPlan plan = plan_hierarchical(sc, config.hier, seed);
      const std::vector<double> lengths(plan.allocation.lengths.data(),
                                        plan.allocation.lengths.data() + plan.allocation.lengths.size());
      out.report.graph_path = plan.graph.path.vertices;
      out.report.allocations = edge_allocations(sc, plan.graph.path, lengths);
      out.ellipses = allocation_ellipses(sc, out.report.allocations);
      out.report.times = plan.times;
      out.trajectory = std::move(plan.refined.trajectory);
      clearance = config.hier.refine.clearance;
      break;
    }
    case PlannerKind::Graph: {
      const auto t0 = std::chrono::steady_clock::now();
      BaselinePlan plan = plan_graph_only(sc, config.hier.graph);
      out.report.times.graph = seconds_since(t0);
      out.report.graph_path = plan.graph->path.vertices;
      out.trajectory = std::move(plan.trajectory);
      break;
    }
    case PlannerKind::Cmaes:
    case PlannerKind::Gradient: {
      const auto t0 = std::chrono::steady_clock::now();
      BaselinePlan plan = planner == PlannerKind::Cmaes
                              ? plan_continuous_cmaes(sc, config.continuous, seed)
                              : plan_continuous_gradient(sc, config.continuous, seed);
      out.report.times.refine = seconds_since(t0);
      out.trajectory = std::move(plan.trajectory);
      clearance = planner == PlannerKind::Cmaes ? config.continuous.clearance
                                                : config.continuous.gradient.clearance;
      break;
    }
  }
  score(sc, config, clearance, out);
  return out;
}

PlanOutput refine_from_allocation(const Scenario& sc, const GraphPath& path,
                                  const std::vector<double>& lengths, const PlannerConfig& config,
                                  std::uint64_t seed) {
  config.validate();
  PlanOutput out;
  out.report.planner = PlannerKind::Hier;
  out.report.seed = seed;
  RefinementResult r = refine_path(sc, path, lengths, config.hier, seed);
  out.report.graph_path = path.vertices;
  out.report.allocations = edge_allocations(sc, path, lengths);
  out.ellipses = allocation_ellipses(sc, out.report.allocations);
  out.report.times.refine = r.seconds;
  out.trajectory = std::move(r.refined.trajectory);
  score(sc, config, config.hier.refine.clearance, out);
  return out;
}

Json plan_json(const PlanOutput& plan) {
  const PlanReport& r = plan.report;
  Json j;
  j["planner"] = to_string(r.planner);
  j["seed"] = r.seed;
  j["objective"] = r.objective;
  j["total_length"] = r.total_length;
  j["feasible"] = r.feasible;
  j["reason"] = r.reason;
  j["n_measurements"] = r.n_measurements;
  j["graph_path"] = r.graph_path;
  j["allocations"] = allocations_json(r.allocations);
  j["weighted_rmse"] = optional_json(r.weighted_rmse);
  Json segs = Json::array();
  const Trajectory& t = plan.trajectory;
  for (std::size_t k = 0; k < t.segments.size(); ++k) {
    Json ctrl = Json::array();
    for (const auto& p : t.segments[k].control()) ctrl.push_back({p.x(), p.y()});
    segs.push_back({{"degree", t.segments[k].degree()},
                    {"control", ctrl},
                    {"measurement_t", t.measurement_t[k]}});
  }
  j["segments"] = segs;
  j["config"] = r.config;
  return j;
}

Json metrics_json(const PlanReport& r) {
  Json j;
  j["planner"] = to_string(r.planner);
  j["seed"] = r.seed;
  j["objective"] = r.objective;
  j["total_length"] = r.total_length;
  j["feasible"] = r.feasible;
  j["n_measurements"] = r.n_measurements;
  j["weighted_rmse"] = optional_json(r.weighted_rmse);
  j["runtime"] = {{"graph", r.times.graph},
                  {"allocation", r.times.allocation},
                  {"refine", r.times.refine},
                  {"total", r.runtime}};
  return j;
}

std::string trajectory_csv(const Trajectory& traj, int samples_per_segment) {
  std::ostringstream out;
  out << "segment_index,t,x,y,is_measurement\n";
  for (std::size_t k = 0; k < traj.segments.size(); ++k) {
    const SplineSegment& seg = traj.segments[k];
    const auto& mt = traj.measurement_t[k];
    const auto& mp = traj.measurement_points[k];
    struct Row {
      double t;
      Point p;
      bool meas;
    };
    std::vector<Row> rows;
    for (std::size_t i = 0; i < mt.size(); ++i) rows.push_back({mt[i], mp[i], true});
    const std::vector<double> ts =
        seg.degree() == 1 ? std::vector<double>{0.0, 1.0} : uniform_parameters(samples_per_segment);
    for (double t : ts) {
      if (std::find(mt.begin(), mt.end(), t) == mt.end()) rows.push_back({t, seg.eval(t), false});
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.t < b.t; });
    for (const auto& r : rows) {
      out << k << ',' << fmt(r.t) << ',' << fmt(r.p.x()) << ',' << fmt(r.p.y()) << ','
          << (r.meas ? 1 : 0) << '\n';
    }
  }
  return out.str();
}

std::string measurements_csv(const Trajectory& traj) {
  std::ostringstream out;
  out << "index,segment_index,t,x,y\n";
  std::size_t idx = 0;
  for (std::size_t k = 0; k < traj.segments.size(); ++k) {
    for (std::size_t i = 0; i < traj.measurement_t[k].size(); ++i) {
      const Point& p = traj.measurement_points[k][i];
      out << idx++ << ',' << k << ',' << fmt(traj.measurement_t[k][i]) << ',' << fmt(p.x()) << ','
          << fmt(p.y()) << '\n';
    }
  }
  return out.str();
}

std::vector<PointList> measurements_from_trajectory_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "segment_index,t,x,y,is_measurement") {
    throw Error(ErrorKind::Validation, "trajectory csv: missing or wrong header");
  }
  std::vector<PointList> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    try {
      if (cells.size() != 5) throw std::invalid_argument("expected 5 columns");
      const long seg = std::stol(cells[0]);
      const int flag = std::stoi(cells[4]);
      if (seg < 0 || (flag != 0 && flag != 1)) throw std::invalid_argument("bad index or flag");
      if (static_cast<std::size_t>(seg) >= out.size()) out.resize(seg + 1);
      if (flag == 1) out[seg].emplace_back(std::stod(cells[2]), std::stod(cells[3]));
    } catch (const std::exception& e) {
      throw Error(ErrorKind::Validation,
                  "trajectory csv line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_artifacts(const std::filesystem::path& out_dir, const Scenario& sc, const PlanOutput& plan) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + out_dir.string() + ": " + ec.message());
  const PointList meas = plan.trajectory.measurements();
  const std::vector<std::pair<std::string, std::string>> files{
      {"plan.json", canonical_dump(plan_json(plan))},
      {"trajectory.csv", trajectory_csv(plan.trajectory)},
      {"measurements.csv", measurements_csv(plan.trajectory)},
      {"plot.svg", render_svg(sc, &plan.trajectory, sc.test_points, meas, plan.ellipses)},
      {"metrics.json", canonical_dump(metrics_json(plan.report))},
  };
  std::vector<std::filesystem::path> written;
  try {
    for (const auto& [name, text] : files) {
      write_text(out_dir / name, text);
      written.push_back(out_dir / name);
    }
  } catch (...) {
    for (const auto& p : written) std::filesystem::remove(p, ec);
    throw;
  }
}

PlanReport run_pipeline(const Scenario& sc, PlannerKind planner, const PlannerConfig& config,
                        std::uint64_t seed, const std::filesystem::path& out_dir) {
  PlanOutput plan = run_planner(sc, planner, config, seed);
  write_artifacts(out_dir, sc, plan);
  return plan.report;
}

Json to_json(const AllocationFile& f, const Scenario& sc) {
  Json j;
  j["seed"] = f.seed;
  j["graph_path"] = f.path.vertices;
  j["coverage"] = f.coverage;
  j["allocations"] = allocations_json(edge_allocations(sc, f.path, f.lengths));
  return j;
}

AllocationFile allocation_file_from_json(const Json& j, const Scenario& sc) {
  AllocationFile f;
  try {
    f.seed = j.at("seed").get<std::uint64_t>();
    f.path.vertices = j.at("graph_path").get<std::vector<std::size_t>>();
    f.coverage = j.value("coverage", 0.0);
    for (const auto& a : j.at("allocations")) f.lengths.push_back(a.at("allocated_len").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Validation, std::string("allocation file: ") + e.what());
  }
  const auto& vs = f.path.vertices;
  std::ostringstream err;
  if (vs.size() < 2 || vs.front() != sc.start || vs.back() != sc.goal) {
    err << "path must run from vertex " << sc.start << " to vertex " << sc.goal << "; ";
  }
  for (std::size_t k = 0; k + 1 < vs.size(); ++k) {
    if (vs[k] >= sc.graph.size() || vs[k + 1] >= sc.graph.size() ||
        sc.graph.find_edge(vs[k], vs[k + 1]) == InformativeGraph::npos) {
      err << "no edge " << vs[k] << "-" << vs[k + 1] << "; ";
      continue;
    }
    const double geo = (sc.graph.vertices()[vs[k + 1]] - sc.graph.vertices()[vs[k]]).norm();
    f.path.length += geo;
    if (k < f.lengths.size() && !(f.lengths[k] >= geo - 1e-9)) {
      err << "allocation " << k << " is shorter than its edge; ";
    }
  }
  if (vs.size() >= 2 && f.lengths.size() != vs.size() - 1) {
    err << f.lengths.size() << " allocations for " << vs.size() - 1 << " edges; ";
  }
  double total = 0.0;
  for (double l : f.lengths) total += l;
  if (total > sc.budget + 1e-6) err << "allocations sum to " << total << ", above the budget " << sc.budget << "; ";
  if (!err.str().empty()) throw Error(ErrorKind::Validation, "allocation file: " + trim_separators(err.str()));
  return f;
}

}  // namespace hipp
