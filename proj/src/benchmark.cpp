#include "hipp/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include "hipp/error.hpp"

namespace hipp {

namespace {

constexpr double kPi = 3.14159265358979323846;

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

// Disk, or a polygon with `sides` vertices on the circle of the given radius.
Obstacle make_obstacle(Rng& rng, const Point& c, double r, int sides) {
  if (sides < 3) return Disk{c, r};
  const double phase = uniform(rng, 0.0, 2.0 * kPi);
  const double step = 2.0 * kPi / sides;
  ConvexPolygon poly;
  for (int i = 0; i < sides; ++i) {
    const double a = phase + step * (i + uniform(rng, -0.3, 0.3));
    poly.vertices.emplace_back(c.x() + r * std::cos(a), c.y() + r * std::sin(a));
  }
  return poly;
}

struct Placed {
  Point center;
  double radius;
};

bool edge_is_clear(const Point& a, const Point& b, const Environment& env, double clearance) {
  constexpr int kSamples = 256;
  for (const auto& o : env.obstacles) {
    if (segment_intersects(o, a, b)) return false;
    for (int s = 0; s <= kSamples; ++s) {
      const Point p = a + (static_cast<double>(s) / kSamples) * (b - a);
      if (signed_distance(p, o) < clearance) return false;
    }
  }
  return true;
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[b] = a;
    return true;
  }
};

using EdgeList = std::vector<std::pair<std::size_t, std::size_t>>;

// Spanning tree over kNN candidates (all clear pairs if needed), then the
// shortest remaining candidates up to n_edges. Empty when impossible.
EdgeList build_edges(const PointList& vs, const Environment& env, int n_edges, int k,
                     double clearance) {
  const std::size_t n = vs.size();
  std::vector<std::tuple<double, std::size_t, std::size_t>> clear;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (edge_is_clear(vs[a], vs[b], env, clearance)) clear.emplace_back((vs[b] - vs[a]).norm(), a, b);
    }
  }
  std::sort(clear.begin(), clear.end());
  if (static_cast<int>(clear.size()) < n_edges) return {};

  std::set<std::pair<std::size_t, std::size_t>> knn;
  for (std::size_t v = 0; v < n; ++v) {
    int taken = 0;
    for (const auto& [len, a, b] : clear) {
      if (a != v && b != v) continue;
      knn.emplace(a, b);
      if (++taken == k) break;
    }
  }

  std::set<std::pair<std::size_t, std::size_t>> chosen;
  UnionFind uf(n);
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& [len, a, b] : clear) {
      if (pass == 0 && !knn.count({a, b})) continue;
      if (uf.unite(a, b)) chosen.emplace(a, b);
    }
  }
  if (chosen.size() != n - 1) return {};
  for (int pass = 0; pass < 2 && static_cast<int>(chosen.size()) < n_edges; ++pass) {
    for (const auto& [len, a, b] : clear) {
      if (static_cast<int>(chosen.size()) >= n_edges) break;
      if (pass == 0 && !knn.count({a, b})) continue;
      chosen.emplace(a, b);
    }
  }
  return EdgeList(chosen.begin(), chosen.end());
}

std::vector<Placed> place_obstacles(Rng& rng, const Rect& ws, int count, double rmin, double rmax,
                                    double gap, int max_attempts,
                                    const std::function<Point(Rng&, double)>& propose) {
  std::vector<Placed> placed;
  for (int attempt = 0; attempt < max_attempts && static_cast<int>(placed.size()) < count; ++attempt) {
    const double r = uniform(rng, rmin, rmax);
    const Point c = propose(rng, r);
    if (c.x() - r < ws.xmin + gap || c.x() + r > ws.xmax - gap || c.y() - r < ws.ymin + gap ||
        c.y() + r > ws.ymax - gap) {
      continue;
    }
    bool ok = true;
    for (const auto& p : placed) {
      if ((p.center - c).norm() < p.radius + r + gap) {
        ok = false;
        break;
      }
    }
    if (ok) placed.push_back({c, r});
  }
  return placed;
}

PointList place_vertices(Rng& rng, const Environment& env, int count, double clearance,
                         double spacing, int max_attempts) {
  PointList vs;
  const Rect& ws = env.workspace;
  for (int attempt = 0; attempt < max_attempts && static_cast<int>(vs.size()) < count; ++attempt) {
    const Point p(uniform(rng, ws.xmin, ws.xmax), uniform(rng, ws.ymin, ws.ymax));
    if (!env.is_free(p, clearance)) continue;
    bool ok = true;
    for (const auto& q : vs) {
      if ((q - p).norm() < spacing) {
        ok = false;
        break;
      }
    }
    if (ok) vs.push_back(p);
  }
  return vs;
}

}  // namespace

Scenario generate_benchmark(const BenchmarkConfig& cfg, std::uint64_t seed) {
  if (cfg.n_vertices < 2 || cfg.n_edges < cfg.n_vertices - 1 || cfg.m < 1 || cfg.n_obstacles < 0 ||
      !(cfg.workspace_size > 0.0) || !(cfg.obstacle_min_radius > 0.0) ||
      cfg.obstacle_max_radius < cfg.obstacle_min_radius) {
    throw Error(ErrorKind::Validation, "benchmark config is not sane");
  }
  cfg.kernel.validate();
  Rng rng(seed);
  const Rect ws{0.0, 0.0, cfg.workspace_size, cfg.workspace_size};

  for (int retry = 0; retry < cfg.max_retries; ++retry) {
    const auto placed = place_obstacles(
        rng, ws, cfg.n_obstacles, cfg.obstacle_min_radius, cfg.obstacle_max_radius, cfg.obstacle_gap,
        2000, [&](Rng& r, double) { return Point(uniform(r, ws.xmin, ws.xmax), uniform(r, ws.ymin, ws.ymax)); });
    if (static_cast<int>(placed.size()) < cfg.n_obstacles) continue;
    Environment env{ws, {}};
    for (const auto& p : placed) {
      const int kind = uniform_int(rng, 0, 4);  // 0: disk, else 3..6 sides
      env.obstacles.push_back(make_obstacle(rng, p.center, p.radius, kind == 0 ? 0 : kind + 2));
    }

    const PointList vs = place_vertices(rng, env, cfg.n_vertices, cfg.vertex_clearance, cfg.vertex_spacing, 5000);
    if (static_cast<int>(vs.size()) < cfg.n_vertices) continue;
    const EdgeList edges = build_edges(vs, env, cfg.n_edges, cfg.neighbours, cfg.edge_clearance);
    if (static_cast<int>(edges.size()) != cfg.n_edges) continue;

    Scenario sc;
    sc.env = env;
    sc.graph = InformativeGraph(vs, edges);
    sc.kernel = cfg.kernel;
    sc.budget = cfg.budget;
    sc.n_measurements = cfg.n_measurements;

    bool found = false;
    for (int t = 0; t < 200 && !found; ++t) {
      const auto s = static_cast<std::size_t>(uniform_int(rng, 0, cfg.n_vertices - 1));
      const auto g = static_cast<std::size_t>(uniform_int(rng, 0, cfg.n_vertices - 1));
      if (s == g || (vs[s] - vs[g]).norm() < cfg.min_separation) continue;
      if (goal_distances(sc.graph, g)[s] > cfg.budget) continue;
      sc.start = s;
      sc.goal = g;
      found = true;
    }
    if (!found) continue;

    while (static_cast<int>(sc.test_points.size()) < cfg.m) {
      const Point p(uniform(rng, ws.xmin, ws.xmax), uniform(rng, ws.ymin, ws.ymax));
      if (env.is_free(p)) sc.test_points.push_back(p);
    }
    sc.validate();
    return sc;
  }
  std::ostringstream msg;
  msg << "generate_benchmark: no valid scene after " << cfg.max_retries << " retries (seed " << seed << ")";
  throw Error(ErrorKind::Generation, msg.str());
}

ArcticScene generate_arctic(std::uint64_t seed, double budget) {
  Rng rng(seed);
  const Rect ws{0.0, 0.0, 20.0, 12.0};
  constexpr int kIslands = 40;
  constexpr int kVertices = 18;
  constexpr int kEdges = 30;

  // Island clusters give narrow channels between land masses.
  std::vector<Point> clusters;
  for (int c = 0; c < 6; ++c) clusters.emplace_back(uniform(rng, 3.0, 17.0), uniform(rng, 2.0, 10.0));
  std::normal_distribution<double> spread(0.0, 1.6);

  for (int retry = 0; retry < 200; ++retry) {
    const auto placed = place_obstacles(rng, ws, kIslands, 0.3, 0.8, 0.35, 20000, [&](Rng& r, double) {
      const Point& c = clusters[static_cast<std::size_t>(uniform_int(r, 0, static_cast<int>(clusters.size()) - 1))];
      return Point(c.x() + spread(r), c.y() + spread(r));
    });
    if (static_cast<int>(placed.size()) < kIslands) continue;
    Environment env{ws, {}};
    for (const auto& p : placed) env.obstacles.push_back(make_obstacle(rng, p.center, p.radius, uniform_int(rng, 3, 6)));

    const PointList vs = place_vertices(rng, env, kVertices, 0.15, 2.0, 20000);
    if (static_cast<int>(vs.size()) < kVertices) continue;
    const EdgeList edges = build_edges(vs, env, kEdges, 5, 0.03);
    if (static_cast<int>(edges.size()) != kEdges) continue;

    ArcticScene out;
    Scenario& sc = out.scenario;
    sc.env = env;
    sc.graph = InformativeGraph(vs, edges);
    sc.kernel = KernelParams{1.8, 0.1, 0.01, std::nullopt};
    sc.budget = budget;
    sc.n_measurements = 60;
    sc.start = static_cast<std::size_t>(std::min_element(vs.begin(), vs.end(), [](const Point& a, const Point& b) {
                                          return a.x() < b.x();
                                        }) - vs.begin());
    sc.goal = static_cast<std::size_t>(std::max_element(vs.begin(), vs.end(), [](const Point& a, const Point& b) {
                                         return a.x() < b.x();
                                       }) - vs.begin());
    const double shortest = goal_distances(sc.graph, sc.goal)[sc.start];
    if (!(shortest <= 0.8 * std::min(budget, 40.0))) continue;

    constexpr int nx = 80;
    constexpr int ny = 48;
    out.importance = FieldGrid{ws, nx, ny, {}, FieldSemantics::Importance};
    out.truth = FieldGrid{ws, nx, ny, {}, FieldSemantics::Truth};
    std::vector<std::pair<Point, double>> bumps;
    for (int b = 0; b < 3; ++b) bumps.emplace_back(Point(uniform(rng, 2.0, 18.0), uniform(rng, 2.0, 10.0)), uniform(rng, 1.5, 3.0));
    const double p1 = uniform(rng, 0.0, 2.0 * kPi);
    const double p2 = uniform(rng, 0.0, 2.0 * kPi);
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const Point c = out.importance.cell_center(i, j);
        double imp = 0.02;
        for (const auto& [m, s] : bumps) imp += std::exp(-(c - m).squaredNorm() / (2.0 * s * s));
        out.importance.values.push_back(imp);
        const double v = 0.55 + 0.3 * std::sin(0.33 * c.x() + p1) * std::cos(0.41 * c.y() + p2) +
                         0.12 * std::sin(0.21 * (c.x() + c.y()) + p2);
        out.truth.values.push_back(std::clamp(v, 0.0, 1.0));
      }
    }
    sc.sampling = TestSampling{"importance.json", 30, seed + 1};
    sc.truth = "truth.json";
    sc.importance_grid = out.importance;
    sc.truth_grid = out.truth;
    try {
      sc.test_points = sample_test_points(out.importance, env, 30, sc.sampling->seed);
      sc.validate();
    } catch (const Error&) {
      continue;
    }
    return out;
  }
  throw Error(ErrorKind::Generation, "generate_arctic: no valid scene after 200 retries");
}

}  // namespace hipp
