// Acceptance suite: one PASS/FAIL line per criterion, with its measured numbers.
//
//   acceptance [--only N] [--allow ID]... [--cli PATH] [--data DIR] [--work DIR]
//
// The exit status is nonzero when a criterion fails that is not listed with --allow.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "hipp/allocation.hpp"
#include "hipp/benchmark.hpp"
#include "hipp/error.hpp"
#include "hipp/geometry.hpp"
#include "hipp/gp.hpp"
#include "hipp/graph.hpp"
#include "hipp/io.hpp"
#include "hipp/pipeline.hpp"
#include "hipp/refine.hpp"
#include "oracles.hpp"

using namespace hipp;
namespace fs = std::filesystem;

namespace {

struct Options {
  int only = 0;
  std::set<std::string> allow;
  std::string cli;
  std::string data = HIPP_DATA_DIR;
  std::string fixture = std::string(HIPP_TEST_DATA) + "/bench-0.json";
  fs::path work = fs::temp_directory_path() / ("hipp-acceptance-" + std::to_string(::getpid()));
};

struct Outcome {
  std::string id;
  bool pass = false;
  std::string detail;
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

PointList random_points(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  PointList p;
  for (std::size_t i = 0; i < n; ++i) p.push_back(oracle::uniform_point(rng, lo, hi));
  return p;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

std::vector<Outcome> gp_oracle() {
  const Timer t;
  const KernelParams params{0.35, 10.0, 0.1, 0.1};
  std::mt19937_64 rng(1001);
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t m = 1 + rng() % 20;
    const std::size_t n = 1 + rng() % 30;
    const PointList tests = random_points(rng, m, 0, 2);
    const PointList x = random_points(rng, n, 0, 2);
    worst = std::max(worst, rel_err(posterior_cov_trace(tests, x, params),
                                     oracle::posterior_trace(tests, x, 0.35, 10.0, 0.1)));
    MeasurementSet data{x, {}};
    std::normal_distribution<double> nd;
    for (std::size_t i = 0; i < n; ++i) data.values.push_back(nd(rng));
    const Eigen::VectorXd mu = posterior_mean(tests, data, params);
    const Eigen::VectorXd ref = oracle::posterior_mean(tests, x, data.values, 0.35, 10.0, 0.1);
    worst = std::max(worst, (mu - ref).cwiseAbs().maxCoeff() / std::max(1.0, ref.cwiseAbs().maxCoeff()));
  }
  const double secs = t.seconds();
  return {{"1", worst <= 1e-8 && secs < 5.0,
           "max relative error " + fmt("%.3g", worst) + ", " + fmt("%.2f", secs) + " s"}};
}

PointList random_polyline(std::mt19937_64& rng, int n, double step) {
  std::uniform_real_distribution<double> u(-step, step);
  PointList p{oracle::uniform_point(rng, -1, 1)};
  for (int i = 1; i < n; ++i) p.push_back(p.back() + Point(u(rng), u(rng)));
  return p;
}

/// `count` points spread evenly by arc length along a polyline.
PointList resample(const PointList& poly, int count) {
  const double total = arc_length(poly);
  PointList out;
  std::size_t k = 0;
  double acc = 0.0;
  for (int i = 0; i < count; ++i) {
    const double s = total * i / (count - 1);
    while (k + 2 < poly.size() && acc + (poly[k + 1] - poly[k]).norm() < s) {
      acc += (poly[k + 1] - poly[k]).norm();
      ++k;
    }
    const double seg = (poly[k + 1] - poly[k]).norm();
    const double f = seg > 0 ? std::clamp((s - acc) / seg, 0.0, 1.0) : 0.0;
    out.push_back(poly[k] + f * (poly[k + 1] - poly[k]));
  }
  return out;
}

std::vector<Outcome> geometric_properties() {
  const Timer t;
  int bad_length = 0;
  int bad_ellipse = 0;
  int bad_kernel = 0;
  std::mt19937_64 rng(2002);
  for (int c = 0; c < 1000; ++c) {
    const PointList poly = random_polyline(rng, 2 + static_cast<int>(rng() % 30), 0.3);
    const double len = arc_length(poly);
    bool ok = (poly.back() - poly.front()).norm() <= len + 1e-9;
    for (const auto& p : poly) ok = ok && (p - poly.front()).norm() + (poly.back() - p).norm() <= len + 1e-9;
    bad_length += ok ? 0 : 1;
  }
  for (int c = 0; c < 1000; ++c) {
    const PointList poly = random_polyline(rng, 2 + static_cast<int>(rng() % 30), 0.3);
    const Ellipse e(poly.front(), poly.back(), arc_length(poly) + 1e-9);
    bool ok = true;
    for (const auto& p : resample(poly, 50)) ok = ok && ellipse_contains(e, p);
    bad_ellipse += ok ? 0 : 1;
  }
  const KernelParams params{0.35, 10.0, 0.1, 0.1};
  const double r = kernel_influence_radius(params);
  for (int c = 0; c < 1000; ++c) {
    const PointList poly = random_polyline(rng, 2 + static_cast<int>(rng() % 20), 0.25);
    const Ellipse e(poly.front(), poly.back(), arc_length(poly) + 1e-12);
    Point x = oracle::uniform_point(rng, -6, 6);
    while (influence_region_contains(e, r, x)) x = oracle::uniform_point(rng, -6, 6);
    bool ok = true;
    for (const auto& p : resample(poly, 200)) ok = ok && kernel_eval(x, p, params) < params.tolerance();
    bad_kernel += ok ? 0 : 1;
  }
  const double secs = t.seconds();
  std::ostringstream d;
  d << "violations: length " << bad_length << "/1000, ellipse " << bad_ellipse << "/1000, kernel " << bad_kernel
    << "/1000, " << fmt("%.2f", secs) << " s";
  return {{"2", bad_length + bad_ellipse + bad_kernel == 0 && secs < 10.0, d.str()}};
}

struct RandomGraph {
  PointList v;
  std::vector<std::pair<std::size_t, std::size_t>> e;
};

RandomGraph random_graph(std::mt19937_64& rng, std::size_t n, std::size_t extra) {
  RandomGraph g;
  g.v = random_points(rng, n, 0, 2);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t i = 1; i < n; ++i) seen.emplace(rng() % i, i);
  for (std::size_t k = 0; k < extra; ++k) {
    const std::size_t a = rng() % n;
    const std::size_t b = rng() % n;
    if (a != b) seen.emplace(std::min(a, b), std::max(a, b));
  }
  g.e.assign(seen.begin(), seen.end());
  return g;
}

PointList vertex_points(const PointList& v, std::vector<std::size_t> idx) {
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  PointList out;
  for (auto i : idx) out.push_back(v[i]);
  return out;
}

std::vector<Outcome> graph_optimality() {
  const Timer t;
  const KernelParams params{0.35, 10.0, 0.1, std::nullopt};
  std::mt19937_64 rng(3003);
  int objective_miss = 0;
  int path_miss = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 3 + rng() % 6;
    const RandomGraph g = random_graph(rng, n, n);
    const InformativeGraph graph(g.v, g.e);
    const PointList tests = random_points(rng, 6, 0, 2);
    const double shortest = oracle::floyd_warshall(g.v, g.e)[0][n - 1];
    const double budget = shortest * (1.0 + std::uniform_real_distribution<double>(0, 1.5)(rng));

    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : oracle::all_simple_paths(g.v, g.e, 0, n - 1, budget)) {
      best = std::min(best, oracle::posterior_trace(tests, vertex_points(g.v, p.path), 0.35, 10.0, 0.1));
    }
    const GraphPlan plan = plan_graph_path(graph, 0, n - 1, budget, tests, params);
    if (!(std::abs(plan.objective - best) <= 1e-9 * std::max(1.0, best))) ++objective_miss;
    if (!(best_by_enumeration(graph, 0, n - 1, budget, tests, params, 1000000).path == plan.path)) ++path_miss;
  }
  const double secs = t.seconds();
  std::ostringstream d;
  d << "objective mismatches " << objective_miss << "/100, path mismatches " << path_miss << "/100, "
    << fmt("%.2f", secs) << " s";
  return {{"3", objective_miss + path_miss == 0 && secs < 30.0, d.str()}};
}

double coverage_by_hand(const Eigen::VectorXd& l, const AllocationProblem& p) {
  double total = 0.0;
  for (std::size_t j = 0; j < p.tests.size(); ++j) {
    double miss = 1.0;
    for (std::size_t e = 0; e < p.edges.size(); ++e) {
      const double d = (p.tests[j] - p.edges[e].first).norm() + (p.tests[j] - p.edges[e].second).norm();
      miss *= 1.0 - 1.0 / (1.0 + std::exp(p.alpha * (d - l(e) - 2.0 * p.r_kernel)));
    }
    total += 1.0 - miss;
  }
  return total;
}

std::vector<Outcome> allocation_correctness() {
  const Timer t;
  std::mt19937_64 rng(4004);
  double worst_grad = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<std::pair<Point, Point>> edges;
    Point at = oracle::uniform_point(rng, 0, 1);
    const int n_edges = 2 + static_cast<int>(rng() % 4);
    double geo = 0.0;
    for (int e = 0; e < n_edges; ++e) {
      const Point next = at + oracle::uniform_point(rng, -0.8, 0.8);
      edges.emplace_back(at, next);
      geo += (next - at).norm();
      at = next;
    }
    const PointList tests = random_points(rng, 12, -1, 2.5);
    const auto p = AllocationProblem::make(edges, tests, geo * std::uniform_real_distribution<double>(1.1, 2.0)(rng),
                                           0.2, 6.0);
    const Eigen::VectorXd l = initial_allocation(p);
    const auto v = allocation_objective(l, p);
    const double h = 1e-6 * std::max(1.0, l.cwiseAbs().maxCoeff());
    for (Eigen::Index e = 0; e < l.size(); ++e) {
      Eigen::VectorXd a = l;
      Eigen::VectorXd b = l;
      a(e) += h;
      b(e) -= h;
      const double fd = (coverage_by_hand(a, p) - coverage_by_hand(b, p)) / (2 * h);
      worst_grad = std::max(worst_grad, std::abs(v.gradient(e) - fd) / std::max(1.0, std::abs(fd)));
    }
  }

  const std::vector<std::pair<Point, Point>> line{
      {Point(0, 0), Point(1, 0)}, {Point(1, 0), Point(2, 0)}, {Point(2, 0), Point(3, 0)}};
  double worst_ratio = std::numeric_limits<double>::infinity();
  int infeasible_iterates = 0;
  for (int rep = 0; rep < 6; ++rep) {
    PointList tests;
    std::normal_distribution<double> nd(0.0, 0.25);
    for (int j = 0; j < 8; ++j) tests.emplace_back(1.5 + nd(rng), 0.9 + nd(rng));
    for (int j = 0; j < 4; ++j) tests.push_back(oracle::uniform_point(rng, -0.5, 3.5));
    const double budget = 4.0 + 0.1 * rep;
    const auto p = AllocationProblem::make(line, tests, budget, 0.2, 10.0);
    AllocationConfig cfg;
    cfg.record_iterates = true;
    const Allocation a = solve_allocation(p, cfg);
    const int units = static_cast<int>(std::floor((budget - 3.0) / 0.01 + 1e-9));
    double best = 0.0;
    for (int i = 0; i <= units; ++i) {
      for (int k = 0; k + i <= units; ++k) {
        Eigen::VectorXd l(3);
        l << 1.0 + 0.01 * i, 1.0 + 0.01 * k, 1.0 + 0.01 * (units - i - k);
        best = std::max(best, coverage_by_hand(l, p));
      }
    }
    worst_ratio = std::min(worst_ratio, a.coverage / best);
    for (const auto& l : a.iterates) {
      if ((l - p.geometric_lengths()).minCoeff() < -1e-12 || l.sum() > budget + 1e-6) ++infeasible_iterates;
    }
  }
  const double secs = t.seconds();
  std::ostringstream d;
  d << "gradient error " << fmt("%.3g", worst_grad) << ", worst toy ratio to grid " << fmt("%.4f", worst_ratio)
    << ", infeasible iterates " << infeasible_iterates << ", " << fmt("%.2f", secs) << " s";
  return {{"4", worst_grad <= 1e-5 && worst_ratio >= 0.99 && infeasible_iterates == 0 && secs < 20.0, d.str()}};
}

std::vector<Outcome> refinement_guarantees() {
  const Timer t;
  const KernelParams params{0.35, 10.0, 0.1, std::nullopt};
  const RefineConfig cfg;
  const Point u(0, 0);
  const Point v(2, 0);
  std::mt19937_64 rng(5005);
  int bad = 0;
  int pruning_diff = 0;
  int pruned_total = 0;
  double min_clear = std::numeric_limits<double>::infinity();
  for (int rep = 0; rep < 50; ++rep) {
    std::uniform_real_distribution<double> unit(0, 1);
    const double budget = 2.0 * (1.0 + 0.6 * unit(rng));
    Environment env{Rect{-1.5, -1.5, 3.5, 1.5}, {}};
    while (env.obstacles.size() < 6) {
      const Disk d{Point(-1.3 + 4.6 * unit(rng), -1.3 + 2.6 * unit(rng)), 0.1 + 0.15 * unit(rng)};
      if (point_segment_distance(d.center, u, v) > d.radius + 0.05) env.obstacles.push_back(d);
    }
    PointList tests;
    for (int j = 0; j < 10; ++j) tests.push_back(Point(-0.5 + 3.0 * unit(rng), -1.2 + 2.4 * unit(rng)));

    const auto sol = refine_segment(u, v, budget, tests, env, params, 12, cfg, rep);
    const SegmentCheck chk = check_segment(sol.spline, budget, env.obstacles, env.workspace, cfg, 12);
    min_clear = std::min(min_clear, chk.min_obstacle_clearance);
    if (!chk.feasible || chk.min_obstacle_clearance < -1e-9 || chk.guarded_length > budget + 1e-9 ||
        sol.diagnostics.objective > sol.diagnostics.initial_objective) {
      ++bad;
    }

    // Deleting every obstacle certified disjoint from the segment's ellipse.
    const double margin = cfg.prune_margin.value_or(1e-3 * params.lengthscale) + 2.0 * cfg.clearance;
    const auto kept = kept_obstacle_indices(env, u, v, budget, margin);
    Environment reduced{env.workspace, {}};
    for (auto k : kept) reduced.obstacles.push_back(env.obstacles[k]);
    pruned_total += static_cast<int>(env.obstacles.size() - kept.size());
    const auto again = refine_segment(u, v, budget, tests, reduced, params, 12, cfg, rep);
    if (!(again.spline.control() == sol.spline.control()) || again.diagnostics.objective != sol.diagnostics.objective) {
      ++pruning_diff;
    }
  }
  const double secs = t.seconds();
  std::ostringstream d;
  d << "guarantee violations " << bad << "/50, min clearance " << fmt("%.3g", min_clear)
    << ", pruning differences " << pruning_diff << "/50 (" << pruned_total << " obstacles deleted), "
    << fmt("%.2f", secs) << " s";
  return {{"5", bad == 0 && pruning_diff == 0 && pruned_total > 0 && secs < 60.0, d.str()}};
}

struct Run {
  double objective = 0.0;
  double runtime = 0.0;
  bool feasible = false;
};

std::vector<Outcome> benchmark_trends() {
  const Timer t;
  const std::vector<PlannerKind> kinds{PlannerKind::Hier, PlannerKind::Graph, PlannerKind::Cmaes};
  std::map<PlannerKind, std::vector<Run>> runs;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Scenario sc = generate_benchmark(BenchmarkConfig{}, seed);
    for (auto k : kinds) {
      const PlanReport r = run_planner(sc, k, PlannerConfig{}, seed).report;
      runs[k].push_back({r.objective, r.runtime, r.feasible});
    }
  }
  const double secs = t.seconds();
  auto mean = [&](PlannerKind k) {
    double s = 0.0;
    for (const auto& r : runs[k]) s += r.objective;
    return s / static_cast<double>(runs[k].size());
  };
  auto feasible = [&](PlannerKind k) {
    return std::count_if(runs[k].begin(), runs[k].end(), [](const Run& r) { return r.feasible; });
  };
  const double hier = mean(PlannerKind::Hier);
  const double graph = mean(PlannerKind::Graph);
  const double cmaes = mean(PlannerKind::Cmaes);
  int hier_faster = 0;
  int graph_fastest = 0;
  for (std::size_t i = 0; i < 20; ++i) {
    const double h = runs[PlannerKind::Hier][i].runtime;
    const double g = runs[PlannerKind::Graph][i].runtime;
    const double c = runs[PlannerKind::Cmaes][i].runtime;
    hier_faster += h < c ? 1 : 0;
    graph_fastest += g < h && g < c ? 1 : 0;
  }
  const bool all_hier_feasible = feasible(PlannerKind::Hier) == 20;
  const std::string time = ", suite " + fmt("%.1f", secs) + " s";

  std::vector<Outcome> out;
  out.push_back({"6a", all_hier_feasible && hier <= 0.9 * graph && secs < 1800.0,
                 "hier mean " + fmt("%.2f", hier) + " vs graph mean " + fmt("%.2f", graph) + " (ratio " +
                     fmt("%.3f", hier / graph) + "), hier feasible " + std::to_string(feasible(PlannerKind::Hier)) +
                     "/20" + time});
  out.push_back({"6b", hier <= cmaes,
                 "hier mean " + fmt("%.2f", hier) + " vs cmaes mean " + fmt("%.2f", cmaes) + ", cmaes feasible " +
                     std::to_string(feasible(PlannerKind::Cmaes)) + "/20"});
  out.push_back({"6c", hier_faster == 20, "hier faster than cmaes on " + std::to_string(hier_faster) + "/20"});
  out.push_back({"6d", graph_fastest == 20, "graph fastest on " + std::to_string(graph_fastest) + "/20"});
  return out;
}

std::vector<Outcome> arctic_trend(const Options& opt) {
  const Timer t;
  const Scenario low = load_scenario(opt.data + "/arctic/scenario.json");
  Scenario high = low;
  high.budget = 65.0;
  std::ostringstream d;
  bool pass = true;
  double rmse[2] = {0.0, 0.0};
  int i = 0;
  for (const Scenario* sc : std::vector<const Scenario*>{&low, &high}) {
    const PlanReport h = run_planner(*sc, PlannerKind::Hier, PlannerConfig{}, 0).report;
    pass = pass && h.feasible && h.weighted_rmse.has_value();
    rmse[i++] = h.weighted_rmse.value_or(std::numeric_limits<double>::infinity());
    d << "budget " << sc->budget << ": hier rmse " << fmt("%.4f", rmse[i - 1]) << " objective "
      << fmt("%.2f", h.objective);
    for (auto k : {PlannerKind::Cmaes, PlannerKind::Gradient}) {
      const PlanReport b = run_planner(*sc, k, PlannerConfig{}, 0).report;
      const bool beaten = !b.feasible || b.objective > h.objective;
      pass = pass && beaten;
      d << ", " << to_string(k) << (b.feasible ? " feasible " : " infeasible ") << fmt("%.2f", b.objective);
    }
    d << "; ";
  }
  pass = pass && rmse[1] < rmse[0];
  const double secs = t.seconds();
  d << fmt("%.1f", secs) << " s";
  return {{"7", pass && secs < 300.0, d.str()}};
}

std::vector<Outcome> determinism(const Options& opt) {
  if (opt.cli.empty()) return {{"8", false, "no --cli given"}};
  std::string plans[2];
  int status[2] = {0, 0};
  int i = 0;
  for (int threads : {1, 8}) {
    const fs::path dir = opt.work / ("threads-" + std::to_string(threads));
    fs::remove_all(dir);
    const std::string cmd = "\"" + opt.cli + "\" plan --scenario \"" + opt.fixture + "\" --seed 7 --threads " +
                            std::to_string(threads) + " --out \"" + dir.string() + "\" > /dev/null";
    status[i] = std::system(cmd.c_str());
    plans[i] = fs::exists(dir / "plan.json") ? oracle::slurp((dir / "plan.json").string()) : "";
    ++i;
  }
  const bool same = status[0] == 0 && status[1] == 0 && !plans[0].empty() && plans[0] == plans[1];
  return {{"8", same, "plan.json " + std::string(same ? "identical" : "differs") + " at 1 and 8 threads (" +
                          std::to_string(plans[0].size()) + " bytes)"}};
}

Options parse(int argc, char** argv) {
  Options opt;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    auto value = [&]() -> std::string {
      if (i + 1 >= argc) throw Error(ErrorKind::Validation, a + " needs a value");
      return argv[++i];
    };
    if (a == "--only") opt.only = std::stoi(value());
    else if (a == "--allow") opt.allow.insert(value());
    else if (a == "--cli") opt.cli = value();
    else if (a == "--data") opt.data = value();
    else if (a == "--work") opt.work = value();
    else throw Error(ErrorKind::Validation, "unknown argument " + a);
  }
  return opt;
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  try {
    opt = parse(argc, argv);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return 3;
  }
  const std::vector<std::pair<int, std::function<std::vector<Outcome>()>>> criteria{
      {1, gp_oracle},
      {2, geometric_properties},
      {3, graph_optimality},
      {4, allocation_correctness},
      {5, refinement_guarantees},
      {6, benchmark_trends},
      {7, [&] { return arctic_trend(opt); }},
      {8, [&] { return determinism(opt); }},
  };
  int blocking = 0;
  for (const auto& [n, run] : criteria) {
    if (opt.only != 0 && opt.only != n) continue;
    std::vector<Outcome> outcomes;
    try {
      outcomes = run();
    } catch (const std::exception& e) {
      outcomes = {{std::to_string(n), false, std::string("error: ") + e.what()}};
    }
    for (const auto& o : outcomes) {
      const bool allowed = !o.pass && opt.allow.count(o.id) > 0;
      std::cout << (o.pass ? "PASS " : "FAIL ") << o.id << ": " << o.detail << (allowed ? " [allowed]" : "") << "\n"
                << std::flush;
      if (!o.pass && !allowed) ++blocking;
    }
  }
  fs::remove_all(opt.work);
  return blocking == 0 ? 0 : 1;
}
