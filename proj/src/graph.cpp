#include "hipp/graph.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <sstream>
#include <unordered_map>

#include "hipp/error.hpp"

namespace hipp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kEdgeCheckIntervals = 1024;

}  // namespace

InformativeGraph::InformativeGraph(PointList vertices,
                                   const std::vector<std::pair<std::size_t, std::size_t>>& edges)
    : vertices_(std::move(vertices)), adjacency_(vertices_.size()) {
  std::ostringstream err;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (!vertices_[i].allFinite()) err << "vertex " << i << " is not finite; ";
  }
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto [a, b] = edges[k];
    if (a >= vertices_.size() || b >= vertices_.size()) {
      err << "edge " << k << " references a missing vertex; ";
      continue;
    }
    if (a == b) {
      err << "edge " << k << " is a self loop; ";
      continue;
    }
    if (find_edge(a, b) != npos) {
      err << "edge " << k << " duplicates an earlier edge; ";
      continue;
    }
    const std::size_t id = edges_.size();
    edges_.push_back({a, b, (vertices_[b] - vertices_[a]).norm()});
    adjacency_[a].emplace_back(b, id);
    adjacency_[b].emplace_back(a, id);
  }
  if (!err.str().empty()) throw Error(ErrorKind::Validation, "graph: " + trim_separators(err.str()));
  for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());
}

std::size_t InformativeGraph::find_edge(std::size_t a, std::size_t b) const {
  if (a >= adjacency_.size()) return npos;
  for (const auto& [n, e] : adjacency_[a]) {
    if (n == b) return e;
  }
  return npos;
}

void InformativeGraph::validate_against(const Environment& env) const {
  std::ostringstream err;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (!env.is_free(vertices_[i])) err << "vertex " << i << " is not in free space; ";
  }
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    const auto& e = edges_[k];
    const Point& a = vertices_[e.a];
    const Point& b = vertices_[e.b];
    for (std::size_t o = 0; o < env.obstacles.size(); ++o) {
      for (int s = 0; s <= kEdgeCheckIntervals; ++s) {
        const double t = static_cast<double>(s) / kEdgeCheckIntervals;
        if (signed_distance(a + t * (b - a), env.obstacles[o]) < 0.0) {
          err << "edge " << k << " (" << e.a << "-" << e.b << ") crosses obstacle " << o << " "
              << describe(env.obstacles[o]) << "; ";
          break;
        }
      }
    }
    for (int s = 0; s <= kEdgeCheckIntervals; ++s) {
      const double t = static_cast<double>(s) / kEdgeCheckIntervals;
      if (workspace_signed_distance(a + t * (b - a), env.workspace) < 0.0) {
        err << "edge " << k << " (" << e.a << "-" << e.b << ") leaves the workspace; ";
        break;
      }
    }
  }
  if (!err.str().empty()) throw Error(ErrorKind::Validation, "graph: " + trim_separators(err.str()));
}

std::vector<double> goal_distances(const InformativeGraph& graph, std::size_t goal) {
  if (goal >= graph.size()) throw Error(ErrorKind::Contract, "goal_distances: goal not in graph");
  std::vector<double> dist(graph.size(), kInf);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[goal] = 0.0;
  queue.emplace(0.0, goal);
  while (!queue.empty()) {
    const auto [d, v] = queue.top();
    queue.pop();
    if (d > dist[v]) continue;
    for (const auto& [n, e] : graph.neighbours(v)) {
      const double nd = d + graph.edges()[e].length;
      if (nd < dist[n]) {
        dist[n] = nd;
        queue.emplace(nd, n);
      }
    }
  }
  return dist;
}

std::vector<std::vector<double>> all_pairs_distances(const InformativeGraph& graph) {
  std::vector<std::vector<double>> out;
  out.reserve(graph.size());
  for (std::size_t v = 0; v < graph.size(); ++v) out.push_back(goal_distances(graph, v));
  return out;
}

PointList path_measurements(const InformativeGraph& graph, const GraphPath& path) {
  std::vector<std::size_t> ids = path.vertices;
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  PointList pts;
  pts.reserve(ids.size());
  for (auto i : ids) pts.push_back(graph.vertices()[i]);
  return pts;
}

double path_objective(const InformativeGraph& graph, const GraphPath& path, PointSpan tests,
                      const KernelParams& params) {
  return posterior_cov_trace(tests, path_measurements(graph, path), params);
}

double budget_tolerance(double budget) { return 1e-9 * std::max(1.0, std::abs(budget)); }

bool better_plan(double obj_a, const GraphPath& a, double obj_b, const GraphPath& b,
                 double tie_tol) {
  if (obj_a < obj_b - tie_tol) return true;
  if (obj_a > obj_b + tie_tol) return false;
  const double len_tol = 1e-12 * std::max(1.0, std::max(a.length, b.length));
  if (a.length < b.length - len_tol) return true;
  if (a.length > b.length + len_tol) return false;
  return a.vertices < b.vertices;
}

namespace {

// Shared depth-first walker over budget-feasible paths, with per-vertex visit limits.
class PathWalker {
 public:
  PathWalker(const InformativeGraph& graph, std::size_t start, std::size_t goal, double budget,
             const GraphSearchConfig& config)
      : graph_(graph),
        goal_(goal),
        budget_(budget),
        tol_(budget_tolerance(budget)),
        max_visits_(config.allow_revisits ? 2 : 1),
        to_goal_(goal_distances(graph, goal)),
        visits_(graph.size(), 0) {
    if (start >= graph.size() || goal >= graph.size()) {
      throw Error(ErrorKind::Contract, "path search: start or goal not in graph");
    }
    const double shortest = to_goal_[start];
    if (!(shortest <= budget + tol_)) {
      std::ostringstream msg;
      msg << "budget " << budget << " is below the shortest start-goal path length " << shortest;
      throw InfeasibleError(msg.str(), shortest, shortest - budget);
    }
    path_.vertices.push_back(start);
    visits_[start] = 1;
  }

  const std::vector<double>& to_goal() const { return to_goal_; }
  double tolerance() const { return tol_; }

  // on_goal(path) is called for every complete path; enter(path) returning
  // false prunes the subtree below the current prefix.
  template <typename OnGoal, typename Enter, typename Order>
  void walk(OnGoal&& on_goal, Enter&& enter, Order&& order) {
    const std::size_t cur = path_.vertices.back();
    if (cur == goal_) {
      on_goal(path_);
      if (max_visits_ == 1) return;
    }
    if (!enter(path_)) return;
    std::vector<std::pair<std::size_t, std::size_t>> children;
    for (const auto& [n, e] : graph_.neighbours(cur)) {
      if (visits_[n] >= max_visits_) continue;
      const double len = path_.length + graph_.edges()[e].length;
      if (len + to_goal_[n] > budget_ + tol_) continue;
      children.emplace_back(n, e);
    }
    order(children);
    for (const auto& [n, e] : children) {
      const double saved = path_.length;
      path_.vertices.push_back(n);
      path_.length = saved + graph_.edges()[e].length;
      ++visits_[n];
      walk(on_goal, enter, order);
      --visits_[n];
      path_.vertices.pop_back();
      path_.length = saved;
    }
  }

 private:
  const InformativeGraph& graph_;
  std::size_t goal_;
  double budget_;
  double tol_;
  int max_visits_;
  std::vector<double> to_goal_;
  std::vector<int> visits_;
  GraphPath path_;
};

// Memoised posterior trace keyed by vertex set (bitmask when the graph is small).
class SetObjective {
 public:
  SetObjective(const InformativeGraph& graph, PointSpan tests, const KernelParams& params)
      : graph_(graph), tests_(tests), params_(params) {}

  double operator()(const std::vector<std::size_t>& ids) {
    std::vector<std::size_t> sorted = ids;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::uint64_t key = 0;
    const bool cacheable = graph_.size() <= 64;
    if (cacheable) {
      for (auto i : sorted) key |= std::uint64_t{1} << i;
      if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    PointList pts;
    pts.reserve(sorted.size());
    for (auto i : sorted) pts.push_back(graph_.vertices()[i]);
    const double value = posterior_cov_trace(tests_, pts, params_);
    if (cacheable) cache_.emplace(key, value);
    return value;
  }

 private:
  const InformativeGraph& graph_;
  PointSpan tests_;
  const KernelParams& params_;
  std::unordered_map<std::uint64_t, double> cache_;
};

double tie_tolerance(PointSpan tests, const KernelParams& params) {
  return 1e-12 * std::max(1.0, static_cast<double>(tests.size()) * params.signal_variance);
}

}  // namespace

GraphPlan plan_graph_path(const InformativeGraph& graph, std::size_t start, std::size_t goal,
                          double budget, PointSpan tests, const KernelParams& params,
                          const GraphSearchConfig& config) {
  PathWalker walker(graph, start, goal, budget, config);
  const auto dist = all_pairs_distances(graph);
  const auto& to_goal = walker.to_goal();
  const double tol = walker.tolerance();
  const double tie_tol = tie_tolerance(tests, params);
  // Monotonicity holds to within this slack numerically.
  const double prune_tol =
      1e-9 * std::max(1.0, static_cast<double>(tests.size()) * params.signal_variance);

  SetObjective objective(graph, tests, params);
  GraphPlan best;
  bool have = false;
  double best_obj = kInf;

  auto on_goal = [&](const GraphPath& p) {
    const double obj = objective(p.vertices);
    if (!have || better_plan(obj, p, best_obj, best.path, tie_tol)) {
      best.path = p;
      best_obj = obj;
      have = true;
    }
  };
  auto enter = [&](const GraphPath& p) {
    ++best.nodes_expanded;
    if (!have) return true;
    const std::size_t cur = p.vertices.back();
    std::vector<std::size_t> reach = p.vertices;
    for (std::size_t w = 0; w < graph.size(); ++w) {
      if (p.length + dist[cur][w] + to_goal[w] <= budget + tol) reach.push_back(w);
    }
    return objective(reach) <= best_obj + prune_tol;
  };
  auto order = [&](std::vector<std::pair<std::size_t, std::size_t>>& children) {
    std::stable_sort(children.begin(), children.end(), [&](const auto& x, const auto& y) {
      if (to_goal[x.first] != to_goal[y.first]) return to_goal[x.first] < to_goal[y.first];
      return x.first < y.first;
    });
  };
  walker.walk(on_goal, enter, order);
  best.objective = best_obj;
  return best;
}

std::vector<GraphPath> enumerate_feasible_paths(const InformativeGraph& graph, std::size_t start,
                                                std::size_t goal, double budget, std::size_t cap,
                                                const GraphSearchConfig& config) {
  std::vector<GraphPath> out;
  try {
    PathWalker walker(graph, start, goal, budget, config);
    walker.walk(
        [&](const GraphPath& p) {
          if (out.size() >= cap) {
            throw Error(ErrorKind::Truncation,
                        "enumerate_feasible_paths: more than " + std::to_string(cap) + " paths");
          }
          out.push_back(p);
        },
        [](const GraphPath&) { return true; }, [](auto&) {});
  } catch (const InfeasibleError&) {
    return {};
  }
  return out;
}

GraphPlan best_by_enumeration(const InformativeGraph& graph, std::size_t start, std::size_t goal,
                              double budget, PointSpan tests, const KernelParams& params,
                              std::size_t cap, const GraphSearchConfig& config) {
  const auto paths = enumerate_feasible_paths(graph, start, goal, budget, cap, config);
  if (paths.empty()) {
    const double shortest = goal_distances(graph, goal)[start];
    throw InfeasibleError("no budget-feasible path", shortest, shortest - budget);
  }
  const double tie_tol = tie_tolerance(tests, params);
  GraphPlan best;
  double best_obj = kInf;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const double obj = path_objective(graph, paths[i], tests, params);
    if (i == 0 || better_plan(obj, paths[i], best_obj, best.path, tie_tol)) {
      best.path = paths[i];
      best_obj = obj;
    }
  }
  best.objective = best_obj;
  best.nodes_expanded = paths.size();
  return best;
}

}  // namespace hipp
