#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hipp/error.hpp"
#include "hipp/geometry.hpp"
#include "hipp/gp.hpp"
#include "hipp/io.hpp"
#include "oracles.hpp"

using namespace hipp;

namespace {

const ConvexPolygon kSquare{{Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)}};

/// Random walk of `n` points with steps up to `step`.
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

/// Dense samples covering an obstacle: its boundary and a grid over its interior.
PointList obstacle_samples(const Obstacle& obs, int n) {
  PointList out;
  if (const auto* d = std::get_if<Disk>(&obs)) {
    for (int i = 0; i < n; ++i) {
      const double a = 2 * std::numbers::pi * i / n;
      for (double r : {1.0, 0.75, 0.5, 0.25, 0.0}) {
        out.push_back(d->center + r * d->radius * Point(std::cos(a), std::sin(a)));
      }
    }
  } else {
    const auto& v = std::get<ConvexPolygon>(obs).vertices;
    Point c = Point::Zero();
    for (const auto& p : v) c += p;
    c /= static_cast<double>(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
      const Point& a = v[k];
      const Point& b = v[(k + 1) % v.size()];
      for (int i = 0; i < n; ++i) {
        const Point p = a + (b - a) * (static_cast<double>(i) / n);
        for (double r : {1.0, 0.75, 0.5, 0.25}) out.push_back(c + r * (p - c));
      }
    }
  }
  return out;
}

double sampled_min_focal(const Obstacle& obs, const Point& u, const Point& v, int n) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : obstacle_samples(obs, n)) best = std::min(best, (p - u).norm() + (p - v).norm());
  return best;
}

Obstacle random_obstacle(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> r(0.1, 0.5);
  const Point c = oracle::uniform_point(rng, -2, 2);
  if (rng() % 2) return Disk{c, r(rng)};
  const int sides = 3 + static_cast<int>(rng() % 4);
  const double rad = r(rng);
  const double phase = r(rng) * 7;
  ConvexPolygon poly;
  for (int i = 0; i < sides; ++i) {
    const double a = phase + 2 * std::numbers::pi * i / sides;
    poly.vertices.push_back(c + rad * Point(std::cos(a), std::sin(a)));
  }
  return poly;
}

}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("arc length of simple polylines") {
    CHECK(arc_length(PointList{Point(0, 0), Point(3, 4)}) == doctest::Approx(5.0));
    CHECK(arc_length(PointList{Point(0, 0), Point(1.5, 2), Point(3, 4)}) == doctest::Approx(5.0));
    CHECK(arc_length(PointList{Point(1, 1), Point(1, 1)}) == 0.0);
    PointList circle;
    for (int i = 0; i <= 1024; ++i) {
      const double a = 2 * std::numbers::pi * i / 1024;
      circle.emplace_back(std::cos(a), std::sin(a));
    }
    CHECK(std::abs(arc_length(circle) - 2 * std::numbers::pi) < 1e-4);
    CHECK(arc_length(circle) < 2 * std::numbers::pi);
  }

  TEST_CASE("ellipse membership") {
    const Point u(0, 0);
    const Point v(2, 0);
    const Ellipse e(u, v, 3.0);
    CHECK(ellipse_contains(e, Point(1, 0)));
    CHECK(ellipse_contains(e, u));
    CHECK(ellipse_contains(e, Point(2.5, 0)));  // (L - |u-v|) / 2 beyond v
    CHECK_FALSE(ellipse_contains(e, Point(2.5 + 1e-9, 0)));
    CHECK_THROWS_AS(Ellipse(u, v, 1.9), Error);
  }

  TEST_CASE("influence region membership") {
    const Ellipse e(Point(0, 0), Point(2, 0), 2.6);
    CHECK(influence_region_contains(e, 0.5, Point(1, 0.2)));
    std::mt19937_64 rng(2);
    for (int i = 0; i < 500; ++i) {
      const Point x = oracle::uniform_point(rng, -2, 4);
      CHECK(influence_region_contains(e, 0.0, x) == ellipse_contains(e, x));
    }
    const Ellipse seg(Point(0, 0), Point(2, 0), 2.0);
    CHECK(influence_region_contains(seg, 0.3, Point(1, 0.3 - 1e-9)));
    CHECK_FALSE(influence_region_contains(seg, 0.3, Point(1, 0.3 + 1e-6)));
    CHECK(influence_region_contains(seg, 0.3, Point(2.2, 0.2)));
    CHECK_FALSE(influence_region_contains(seg, 0.3, Point(2.25, 0.2)));
  }

  TEST_CASE("signed distances") {
    const Disk d{Point(1, 1), 0.5};
    CHECK(signed_distance(Point(1, 1), d) == doctest::Approx(-0.5));
    CHECK(std::abs(signed_distance(Point(1.5, 1), d)) < 1e-12);
    CHECK(signed_distance(Point(2, 0.5), kSquare) == doctest::Approx(1.0));
    CHECK(signed_distance(Point(2, 2), kSquare) == doctest::Approx(std::sqrt(2.0)));
    CHECK(signed_distance(Point(0.5, 0.5), kSquare) == doctest::Approx(-0.5));
    CHECK(std::abs(signed_distance(Point(1, 0.3), kSquare)) < 1e-12);
    CHECK(std::abs(signed_distance(Point(1, 1), kSquare)) < 1e-12);
  }

  TEST_CASE("signed distance is 1-Lipschitz and matches the prepared form") {
    std::mt19937_64 rng(7);
    for (int k = 0; k < 50; ++k) {
      const Obstacle obs = random_obstacle(rng);
      const PreparedObstacle prep(obs);
      for (int i = 0; i < 40; ++i) {
        const Point a = oracle::uniform_point(rng, -3, 3);
        const Point b = oracle::uniform_point(rng, -3, 3);
        CHECK(std::abs(signed_distance(a, obs) - signed_distance(b, obs)) <= (a - b).norm() + 1e-12);
        CHECK(prep.signed_distance(a) == doctest::Approx(signed_distance(a, obs)).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("workspace signed distance") {
    const Rect ws{0, 0, 4, 2};
    CHECK(workspace_signed_distance(Point(2, 1), ws) == doctest::Approx(1.0));
    CHECK(std::abs(workspace_signed_distance(Point(4, 2), ws)) < 1e-12);
    CHECK(workspace_signed_distance(Point(4.3, 1), ws) == doctest::Approx(-0.3));
  }

  TEST_CASE("min focal sum on simple cases") {
    const Point u(0, 0);
    const Point v(3, 0);
    CHECK(min_focal_sum(Disk{Point(1.5, 0.1), 0.3}, u, v) == doctest::Approx(3.0).epsilon(1e-6));
    const ConvexPolygon around_u{{Point(-0.5, -0.5), Point(0.5, -0.5), Point(0.5, 0.5), Point(-0.5, 0.5)}};
    CHECK(min_focal_sum(around_u, u, v) == doctest::Approx(3.0).epsilon(1e-6));
  }

  TEST_CASE("min focal sum against a dense sampling oracle") {
    const Point u(0, 0);
    const Point v(2, 0.5);
    const Disk far{Point(1.0, 3.0), 0.4};
    // ~10^6 samples of the disk on a polar grid.
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 2000; ++i) {
      const double a = 2 * std::numbers::pi * i / 2000;
      for (int j = 0; j <= 500; ++j) {
        const Point p = far.center + (far.radius * j / 500.0) * Point(std::cos(a), std::sin(a));
        best = std::min(best, (p - u).norm() + (p - v).norm());
      }
    }
    const double g = min_focal_sum(far, u, v, 1e-6);
    CHECK(g <= best + 1e-6);
    CHECK(g >= best - 2e-5);
    const double naive = (far.center - u).norm() + (far.center - v).norm();
    CHECK(g < naive);
    CHECK(g > naive - 2 * far.radius - 1e-9);
  }

  TEST_CASE("pruning keeps exactly the obstacles reaching the ellipse on the benchmark fixture") {
    const Scenario sc = load_scenario(std::string(HIPP_TEST_DATA) + "/bench-0.json");
    const double margin = 1e-3 * sc.kernel.lengthscale;
    int compared = 0;
    for (const auto& e : sc.graph.edges()) {
      const Point& u = sc.graph.vertices()[e.a];
      const Point& v = sc.graph.vertices()[e.b];
      const double budget = 1.15 * e.length;
      const auto kept = kept_obstacle_indices(sc.env, u, v, budget, margin);
      for (std::size_t k = 0; k < sc.env.obstacles.size(); ++k) {
        const double sampled = sampled_min_focal(sc.env.obstacles[k], u, v, 400);
        if (std::abs(sampled - budget) < 0.01) continue;  // too close to call by sampling
        const bool is_kept = std::find(kept.begin(), kept.end(), k) != kept.end();
        CHECK(is_kept == (sampled <= budget));
        ++compared;
      }
      CHECK(prune_obstacles(sc.env, u, v, budget, margin).size() == kept.size());
    }
    CHECK(compared > 100);
  }

  TEST_CASE("pruning never drops an obstacle that reaches the ellipse") {
    std::mt19937_64 rng(13);
    for (int scene = 0; scene < 40; ++scene) {
      Environment env{Rect{-3, -3, 3, 3}, {}};
      for (int k = 0; k < 8; ++k) env.obstacles.push_back(random_obstacle(rng));
      const Point u = oracle::uniform_point(rng, -2.5, 2.5);
      const Point v = oracle::uniform_point(rng, -2.5, 2.5);
      const double budget = (u - v).norm() * (1.0 + 0.5 * std::uniform_real_distribution<double>(0, 1)(rng));
      const auto kept = kept_obstacle_indices(env, u, v, budget, 1e-4);
      for (std::size_t k = 0; k < env.obstacles.size(); ++k) {
        if (std::find(kept.begin(), kept.end(), k) != kept.end()) continue;
        for (const auto& p : obstacle_samples(env.obstacles[k], 200)) {
          CHECK((p - u).norm() + (p - v).norm() > budget);
        }
      }
    }
  }

  TEST_CASE("curve length bounds the endpoint chord and focal sums") {
    std::mt19937_64 rng(19);
    for (int c = 0; c < 1000; ++c) {
      const PointList poly = random_polyline(rng, 2 + static_cast<int>(rng() % 30), 0.3);
      const double len = arc_length(poly);
      CHECK((poly.back() - poly.front()).norm() <= len + 1e-9);
      for (const auto& p : poly) {
        CHECK((p - poly.front()).norm() + (poly.back() - p).norm() <= len + 1e-9);
      }
    }
  }

  TEST_CASE("curves within the length budget stay inside the ellipse") {
    std::mt19937_64 rng(29);
    for (int c = 0; c < 1000; ++c) {
      const PointList poly = random_polyline(rng, 2 + static_cast<int>(rng() % 30), 0.3);
      const double len = arc_length(poly) + 1e-12;
      const Ellipse e(poly.front(), poly.back(), len);
      for (const auto& p : resample(poly, 50)) CHECK(ellipse_contains(e, p));
    }
  }

  TEST_CASE("points outside the inflated ellipse see kernel values below tolerance") {
    const KernelParams params{0.35, 10.0, 0.1, 0.1};
    const double r = kernel_influence_radius(params);
    std::mt19937_64 rng(31);
    int tested = 0;
    for (int c = 0; c < 1000; ++c) {
      const PointList poly = random_polyline(rng, 2 + static_cast<int>(rng() % 20), 0.25);
      const double len = arc_length(poly) + 1e-12;
      const Ellipse e(poly.front(), poly.back(), len);
      Point x = oracle::uniform_point(rng, -6, 6);
      while (influence_region_contains(e, r, x)) x = oracle::uniform_point(rng, -6, 6);
      for (const auto& p : resample(poly, 200)) CHECK(kernel_eval(x, p, params) < params.tolerance());
      ++tested;
    }
    CHECK(tested == 1000);
  }
}
