#include "hipp/hierarchical.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <thread>

#include "hipp/error.hpp"

namespace hipp {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

void HierConfig::validate() const {
  if (alpha && !(*alpha > 0.0)) throw Error(ErrorKind::Validation, "alpha must be > 0");
  if (threads < 1) throw Error(ErrorKind::Validation, "threads must be >= 1");
  if (allocation.max_iters < 1 || !(allocation.tol > 0.0) || allocation.perturbed_starts < 0) {
    throw Error(ErrorKind::Validation, "allocation settings out of range");
  }
  refine.validate();
}

std::uint64_t segment_seed(std::uint64_t seed, std::size_t index) {
  // splitmix64 finaliser over the seed and index
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(index) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& job) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  std::vector<std::exception_ptr> errors(n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            job(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

namespace {

template <class F>
auto staged(const char* stage, F&& f) {
  try {
    return f();
  } catch (const InfeasibleError& e) {
    throw InfeasibleError(std::string(stage) + " stage: " + e.what(), e.shortest(), e.deficit());
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(stage) + " stage: " + e.what());
  }
}

std::vector<std::pair<Point, Point>> path_edges(const Scenario& sc, const GraphPath& path) {
  std::vector<std::pair<Point, Point>> edges;
  const auto& vs = path.vertices;
  for (std::size_t k = 0; k + 1 < vs.size(); ++k) {
    edges.emplace_back(sc.graph.vertices()[vs[k]], sc.graph.vertices()[vs[k + 1]]);
  }
  return edges;
}

}  // namespace

RefinementResult refine_path(const Scenario& sc, const GraphPath& path,
                             std::span<const double> lengths, const HierConfig& config,
                             std::uint64_t seed) {
  config.validate();
  const auto edges = path_edges(sc, path);
  const std::size_t n_seg = edges.size();
  if (lengths.size() != n_seg) {
    throw Error(ErrorKind::Shape, "refine stage: " + std::to_string(lengths.size()) +
                                      " allocations for " + std::to_string(n_seg) + " edges");
  }
  const auto t0 = std::chrono::steady_clock::now();
  RefinementResult out;
  const std::vector<int> counts =
      staged("refine", [&] { return distribute_measurements(lengths, sc.n_measurements); });
  std::vector<SplineSolution> solutions(n_seg);
  auto refine_one = [&](std::size_t e, PointSpan prior) {
    try {
      solutions[e] = refine_segment(edges[e].first, edges[e].second, lengths[e], sc.test_points,
                                    sc.env, sc.kernel, counts[e], config.refine,
                                    segment_seed(seed, e), prior);
    } catch (const Error& err) {
      throw Error(err.kind(), "refine stage: segment " + std::to_string(e) + ": " + err.what());
    }
  };
  if (config.refine.sequential_conditioning) {
    PointList prior;
    for (std::size_t e = 0; e < n_seg; ++e) {
      refine_one(e, prior);
      const PointList pts = solutions[e].spline.sample(counts[e]);
      prior.insert(prior.end(), pts.begin(), pts.end());
    }
  } else {
    parallel_for(n_seg, config.threads, [&](std::size_t e) { refine_one(e, {}); });
  }

  std::vector<SplineSegment> splines;
  for (auto& s : solutions) {
    out.segments.push_back(s.diagnostics);
    splines.push_back(s.spline);
  }
  out.refined = staged("assembly", [&] {
    return assemble_trajectory(std::move(splines), lengths, sc.test_points, sc.kernel,
                               sc.n_measurements, sc.budget, config.refine.m_quad);
  });
  out.seconds = seconds_since(t0);
  out.check = validate_trajectory(out.refined.trajectory, sc.env, sc.start_point(), sc.goal_point(),
                                  sc.budget, config.refine.clearance);
  return out;
}

HierPlan plan_hierarchical(const Scenario& sc, const HierConfig& config, std::uint64_t seed) {
  config.validate();
  HierPlan plan;

  auto t0 = std::chrono::steady_clock::now();
  plan.graph = staged("graph", [&] {
    return plan_graph_path(sc.graph, sc.start, sc.goal, sc.budget, sc.test_points, sc.kernel,
                           config.graph);
  });
  plan.times.graph = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  staged("allocation", [&] {
    const double alpha = config.alpha.value_or(10.0 / sc.kernel.lengthscale);
    plan.allocation_problem = AllocationProblem::make(
        path_edges(sc, plan.graph.path), sc.test_points, sc.budget, kernel_influence_radius(sc.kernel), alpha);
    AllocationConfig alloc_cfg = config.allocation;
    alloc_cfg.seed = seed;
    plan.allocation = solve_allocation(plan.allocation_problem, alloc_cfg);
    return 0;
  });
  plan.times.allocation = seconds_since(t0);

  const std::vector<double> lengths(plan.allocation.lengths.data(),
                                    plan.allocation.lengths.data() + plan.allocation.lengths.size());
  RefinementResult r = refine_path(sc, plan.graph.path, lengths, config, seed);
  plan.segments = std::move(r.segments);
  plan.refined = std::move(r.refined);
  plan.check = std::move(r.check);
  plan.times.refine = r.seconds;
  return plan;
}

}  // namespace hipp
