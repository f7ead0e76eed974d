// hipp: command-line front end for planning, evaluation and benchmarking.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hipp/benchmark.hpp"
#include "hipp/compare.hpp"
#include "hipp/config.hpp"
#include "hipp/error.hpp"
#include "hipp/graph.hpp"
#include "hipp/hierarchical.hpp"
#include "hipp/io.hpp"
#include "hipp/oracle.hpp"
#include "hipp/pipeline.hpp"

namespace fs = std::filesystem;
using hipp::Json;

namespace {

struct Common {
  std::string scenario;
  std::string config;
  std::uint64_t seed = 0;
  double budget = -1.0;
  int threads = 0;
};

void add_scenario_options(CLI::App* cmd, Common& c) {
  cmd->add_option("--scenario", c.scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "Planner seed");
  cmd->add_option("--budget", c.budget, "Override the scenario budget");
  cmd->add_option("--threads", c.threads, "Workers for segment refinement");
  cmd->add_option("--config", c.config, "TOML file overriding planner defaults")->check(CLI::ExistingFile);
}

hipp::Scenario load(const Common& c) {
  hipp::Scenario sc = hipp::load_scenario(c.scenario);
  if (c.budget >= 0.0) {
    sc.budget = c.budget;
    sc.validate();
  }
  for (const auto& w : sc.warnings()) std::cerr << "warning: " << w << "\n";
  return sc;
}

hipp::PlannerConfig config_for(const Common& c) {
  hipp::PlannerConfig cfg = c.config.empty() ? hipp::PlannerConfig{} : hipp::load_planner_config(c.config);
  if (c.threads > 0) cfg.hier.threads = c.threads;
  cfg.validate();
  return cfg;
}

void print_summary(const hipp::PlanReport& r) {
  std::printf("planner %s  objective %.6f  length %.4f  feasible %s  measurements %d  runtime %.3fs\n",
              hipp::to_string(r.planner), r.objective, r.total_length, r.feasible ? "yes" : "no",
              r.n_measurements, r.runtime);
  if (!r.feasible) std::printf("infeasible: %s\n", r.reason.c_str());
  if (r.weighted_rmse) std::printf("weighted rmse %.6f\n", *r.weighted_rmse);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

hipp::Trajectory trajectory_from_plan(const Json& plan) {
  hipp::Trajectory traj;
  for (const auto& s : plan.at("segments")) {
    hipp::PointList ctrl;
    for (const auto& p : s.at("control")) ctrl.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    traj.segments.emplace_back(ctrl, s.at("degree").get<int>());
    auto ts = s.at("measurement_t").get<std::vector<double>>();
    hipp::PointList pts;
    for (double t : ts) pts.push_back(traj.segments.back().eval(t));
    traj.measurement_t.push_back(std::move(ts));
    traj.measurement_points.push_back(std::move(pts));
  }
  return traj;
}

int report_error(const hipp::Error& e) {
  Json j;
  j["status"] = hipp::to_string(e.kind());
  j["message"] = e.what();
  if (const auto* inf = dynamic_cast<const hipp::InfeasibleError*>(&e)) {
    j["shortest_path"] = inf->shortest();
    j["deficit"] = inf->deficit();
  }
  std::cout << j.dump(2) << "\n";
  std::cerr << "error: " << e.what() << "\n";
  return hipp::exit_code(e.kind());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical informative path planning"};
  app.require_subcommand(1);

  Common plan_opts;
  std::string planner = "hier";
  std::string out_dir;
  auto* plan = app.add_subcommand("plan", "Plan and write plan.json, trajectory.csv, measurements.csv, plot.svg, metrics.json");
  add_scenario_options(plan, plan_opts);
  plan->add_option("--planner", planner, "hier, graph, cmaes or gradient");
  plan->add_option("--out", out_dir, "Output directory")->required();

  Common alloc_opts;
  std::string alloc_out;
  auto* allocate = app.add_subcommand("allocate", "Graph search and budget allocation only");
  add_scenario_options(allocate, alloc_opts);
  allocate->add_option("--out", alloc_out, "Allocation JSON to write")->required();

  Common refine_opts;
  std::string refine_in;
  std::string refine_out;
  auto* refine = app.add_subcommand("refine", "Refine the path and allocation of an allocate run");
  add_scenario_options(refine, refine_opts);
  refine->add_option("--allocation", refine_in, "Allocation JSON")->required()->check(CLI::ExistingFile);
  refine->add_option("--out", refine_out, "Output directory")->required();

  Common eval_opts;
  std::string eval_traj;
  std::string eval_plan;
  auto* eval = app.add_subcommand("eval", "Recompute the objective of a trajectory.csv");
  add_scenario_options(eval, eval_opts);
  eval->add_option("--trajectory", eval_traj, "trajectory.csv")->required()->check(CLI::ExistingFile);
  eval->add_option("--plan", eval_plan, "plan.json, enables the feasibility check")->check(CLI::ExistingFile);

  std::uint64_t gen_seed = 0;
  int gen_count = 1;
  bool gen_arctic = false;
  double gen_budget = -1.0;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen-bench", "Generate benchmark scenarios");
  gen->add_option("--seed", gen_seed, "First generator seed");
  gen->add_option("--count", gen_count, "Number of consecutive seeds")->check(CLI::PositiveNumber);
  gen->add_flag("--arctic", gen_arctic, "Archipelago scene with importance and truth grids");
  gen->add_option("--budget", gen_budget, "Scenario budget");
  gen->add_option("--out", gen_out, "Output directory")->required();

  std::vector<std::string> cmp_scenarios;
  int cmp_bench = 0;
  std::string cmp_planners = "hier,graph,cmaes,gradient";
  std::string cmp_seeds = "0";
  std::string cmp_config;
  std::string cmp_out;
  auto* cmp = app.add_subcommand("compare", "Run planners over scenarios and tabulate");
  cmp->add_option("--scenario", cmp_scenarios, "Scenario files")->check(CLI::ExistingFile);
  cmp->add_option("--bench", cmp_bench, "Also generate benchmark seeds 0..N-1");
  cmp->add_option("--planner", cmp_planners, "Comma-separated planners");
  cmp->add_option("--seeds", cmp_seeds, "Comma-separated planner seeds");
  cmp->add_option("--config", cmp_config, "TOML file overriding planner defaults")->check(CLI::ExistingFile);
  cmp->add_option("--out", cmp_out, "Directory for compare.csv and compare.md")->required();

  Common oracle_opts;
  std::string oracle_kind;
  std::string oracle_traj;
  double oracle_resolution = 0.01;
  long oracle_cap = 1'000'000;
  auto* oracle = app.add_subcommand("oracle", "Slow reference computations for audits");
  add_scenario_options(oracle, oracle_opts);
  oracle->add_option("kind", oracle_kind, "gp, graph or allocation")
      ->required()
      ->check(CLI::IsMember({"gp", "graph", "allocation"}));
  oracle->add_option("--trajectory", oracle_traj, "trajectory.csv for the gp oracle")->check(CLI::ExistingFile);
  oracle->add_option("--resolution", oracle_resolution, "Allocation grid step");
  oracle->add_option("--cap", oracle_cap, "Enumeration limit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

  try {
    if (*plan) {
      const hipp::Scenario sc = load(plan_opts);
      const hipp::PlanReport r = hipp::run_pipeline(sc, hipp::planner_from_string(planner),
                                                    config_for(plan_opts), plan_opts.seed, out_dir);
      print_summary(r);
    } else if (*allocate) {
      const hipp::Scenario sc = load(alloc_opts);
      const hipp::PlannerConfig cfg = config_for(alloc_opts);
      const hipp::GraphPlan g = hipp::plan_graph_path(sc.graph, sc.start, sc.goal, sc.budget,
                                                      sc.test_points, sc.kernel, cfg.hier.graph);
      std::vector<std::pair<hipp::Point, hipp::Point>> edges;
      for (std::size_t k = 0; k + 1 < g.path.vertices.size(); ++k) {
        edges.emplace_back(sc.graph.vertices()[g.path.vertices[k]], sc.graph.vertices()[g.path.vertices[k + 1]]);
      }
      const auto problem = hipp::AllocationProblem::make(
          edges, sc.test_points, sc.budget, hipp::kernel_influence_radius(sc.kernel),
          cfg.hier.alpha.value_or(10.0 / sc.kernel.lengthscale));
      hipp::AllocationConfig ac = cfg.hier.allocation;
      ac.seed = alloc_opts.seed;
      const hipp::Allocation a = hipp::solve_allocation(problem, ac);
      hipp::AllocationFile f;
      f.seed = alloc_opts.seed;
      f.path = g.path;
      f.lengths.assign(a.lengths.data(), a.lengths.data() + a.lengths.size());
      f.coverage = a.coverage;
      hipp::write_text(alloc_out, hipp::canonical_dump(hipp::to_json(f, sc)));
      std::printf("path of %zu edges, length %.4f, coverage %.4f\n", g.path.num_edges(), g.path.length, a.coverage);
    } else if (*refine) {
      const hipp::Scenario sc = load(refine_opts);
      const hipp::AllocationFile f =
          hipp::allocation_file_from_json(Json::parse(hipp::read_text(refine_in)), sc);
      const hipp::PlanOutput out =
          hipp::refine_from_allocation(sc, f.path, f.lengths, config_for(refine_opts), refine_opts.seed);
      hipp::write_artifacts(refine_out, sc, out);
      print_summary(out.report);
    } else if (*eval) {
      const hipp::Scenario sc = load(eval_opts);
      const auto per_seg = hipp::measurements_from_trajectory_csv(hipp::read_text(eval_traj));
      hipp::PointList meas;
      for (const auto& s : per_seg) meas.insert(meas.end(), s.begin(), s.end());
      Json j;
      j["objective"] = hipp::posterior_cov_trace(sc.test_points, meas, sc.kernel);
      j["n_measurements"] = meas.size();
      const auto rmse = hipp::scenario_weighted_rmse(sc, meas);
      j["weighted_rmse"] = rmse ? Json(*rmse) : Json(nullptr);
      if (!eval_plan.empty()) {
        const hipp::Trajectory traj = trajectory_from_plan(Json::parse(hipp::read_text(eval_plan)));
        const auto check = hipp::validate_trajectory(traj, sc.env, sc.start_point(), sc.goal_point(), sc.budget);
        j["feasible"] = check.feasible;
        j["length"] = check.length;
        j["reason"] = check.reason;
      }
      std::cout << j.dump(2) << "\n";
    } else if (*gen) {
      fs::create_directories(gen_out);
      if (gen_arctic) {
        const hipp::ArcticScene scene = hipp::generate_arctic(gen_seed, gen_budget > 0 ? gen_budget : 40.0);
        hipp::save_field_grid(scene.importance, fs::path(gen_out) / "importance.json");
        hipp::save_field_grid(scene.truth, fs::path(gen_out) / "truth.json");
        hipp::save_scenario(scene.scenario, fs::path(gen_out) / "scenario.json");
        std::printf("wrote %s\n", (fs::path(gen_out) / "scenario.json").c_str());
      } else {
        for (int i = 0; i < gen_count; ++i) {
          hipp::BenchmarkConfig bc;
          if (gen_budget > 0) bc.budget = gen_budget;
          const std::uint64_t s = gen_seed + static_cast<std::uint64_t>(i);
          const fs::path path = fs::path(gen_out) / ("bench-" + std::to_string(s) + ".json");
          hipp::save_scenario(hipp::generate_benchmark(bc, s), path);
          std::printf("wrote %s\n", path.c_str());
        }
      }
    } else if (*cmp) {
      std::vector<std::pair<std::string, hipp::Scenario>> scenarios;
      for (const auto& f : cmp_scenarios) scenarios.emplace_back(fs::path(f).stem().string(), hipp::load_scenario(f));
      for (int i = 0; i < cmp_bench; ++i) {
        scenarios.emplace_back("bench-" + std::to_string(i), hipp::generate_benchmark({}, i));
      }
      if (scenarios.empty()) throw hipp::Error(hipp::ErrorKind::Validation, "compare: no scenarios given");
      std::vector<hipp::PlannerKind> planners;
      for (const auto& p : split(cmp_planners, ',')) planners.push_back(hipp::planner_from_string(p));
      std::vector<std::uint64_t> seeds;
      for (const auto& s : split(cmp_seeds, ',')) seeds.push_back(std::stoull(s));
      const hipp::PlannerConfig cfg = cmp_config.empty() ? hipp::PlannerConfig{} : hipp::load_planner_config(cmp_config);
      const auto runs = hipp::run_suite(scenarios, planners, seeds, cfg);
      const hipp::Comparison c = hipp::compare(runs);
      fs::create_directories(cmp_out);
      hipp::write_text(fs::path(cmp_out) / "compare.csv", hipp::comparison_csv(c));
      hipp::write_text(fs::path(cmp_out) / "compare.md", hipp::comparison_markdown(c));
      std::cout << hipp::comparison_markdown(c);
    } else if (*oracle) {
      const hipp::Scenario sc = load(oracle_opts);
      Json j;
      if (oracle_kind == "gp") {
        if (oracle_traj.empty()) throw hipp::Error(hipp::ErrorKind::Validation, "oracle gp: --trajectory is required");
        hipp::PointList meas;
        for (const auto& s : hipp::measurements_from_trajectory_csv(hipp::read_text(oracle_traj))) {
          meas.insert(meas.end(), s.begin(), s.end());
        }
        j["dense"] = hipp::dense_posterior_trace(sc.test_points, meas, sc.kernel);
        j["cholesky"] = hipp::posterior_cov_trace(sc.test_points, meas, sc.kernel);
      } else if (oracle_kind == "graph") {
        const hipp::PlannerConfig cfg = config_for(oracle_opts);
        const auto bb = hipp::plan_graph_path(sc.graph, sc.start, sc.goal, sc.budget, sc.test_points, sc.kernel, cfg.hier.graph);
        const auto en = hipp::best_by_enumeration(sc.graph, sc.start, sc.goal, sc.budget, sc.test_points,
                                                  sc.kernel, static_cast<std::size_t>(oracle_cap), cfg.hier.graph);
        j["branch_and_bound"] = {{"path", bb.path.vertices}, {"objective", bb.objective}};
        j["enumeration"] = {{"path", en.path.vertices}, {"objective", en.objective}};
      } else {
        const hipp::PlannerConfig cfg = config_for(oracle_opts);
        const auto g = hipp::plan_graph_path(sc.graph, sc.start, sc.goal, sc.budget, sc.test_points, sc.kernel, cfg.hier.graph);
        std::vector<std::pair<hipp::Point, hipp::Point>> edges;
        for (std::size_t k = 0; k + 1 < g.path.vertices.size(); ++k) {
          edges.emplace_back(sc.graph.vertices()[g.path.vertices[k]], sc.graph.vertices()[g.path.vertices[k + 1]]);
        }
        const auto problem = hipp::AllocationProblem::make(
            edges, sc.test_points, sc.budget, hipp::kernel_influence_radius(sc.kernel),
            cfg.hier.alpha.value_or(10.0 / sc.kernel.lengthscale));
        hipp::AllocationConfig ac = cfg.hier.allocation;
        ac.seed = oracle_opts.seed;
        const auto a = hipp::solve_allocation(problem, ac);
        const auto grid = hipp::grid_search_allocation(problem, oracle_resolution, oracle_cap);
        j["solver"] = {{"coverage", a.coverage}, {"lengths", std::vector<double>(a.lengths.data(), a.lengths.data() + a.lengths.size())}};
        j["grid"] = {{"coverage", grid.value}, {"evaluated", grid.evaluated},
                     {"lengths", std::vector<double>(grid.lengths.data(), grid.lengths.data() + grid.lengths.size())}};
      }
      std::cout << j.dump(2) << "\n";
    }
  } catch (const hipp::Error& e) {
    return report_error(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
