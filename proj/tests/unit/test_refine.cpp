#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hipp/bspline.hpp"
#include "hipp/error.hpp"
#include "hipp/refine.hpp"
#include "hipp/trajectory.hpp"
#include "oracles.hpp"

using namespace hipp;

namespace {

const KernelParams kDesk{0.35, 10.0, 0.1, std::nullopt};

// Refined objective for the side-cluster scene, recorded from the first verified run.
constexpr double kSideClusterPin = 7.09474201338047;

PointList dense(const SplineSegment& s, int n) { return s.sample(n); }

/// Test points in a disk of radius 0.3 centred beside the edge (0,0)-(2,0).
PointList side_cluster() {
  PointList t;
  for (int i = 0; i < 12; ++i) {
    const double a = 2 * std::numbers::pi * i / 12;
    t.emplace_back(1.0 + 0.3 * std::cos(a), 0.9 + 0.3 * std::sin(a));
  }
  t.emplace_back(1.0, 0.9);
  return t;
}

}  // namespace

TEST_SUITE("bspline") {
  TEST_CASE("clamped basis endpoints and partition of unity") {
    const auto knots = clamped_uniform_knots(5, 3);
    CHECK(knots.size() == 9);
    const Eigen::VectorXd b0 = bspline_basis(0.0, 3, knots);
    const Eigen::VectorXd b1 = bspline_basis(1.0, 3, knots);
    for (int i = 0; i < 5; ++i) {
      CHECK(b0(i) == (i == 0 ? 1.0 : 0.0));
      CHECK(b1(i) == (i == 4 ? 1.0 : 0.0));
    }
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0, 1);
    for (int k = 0; k < 1000; ++k) {
      const Eigen::VectorXd b = bspline_basis(u(rng), 3, knots);
      CHECK(std::abs(b.sum() - 1.0) < 1e-12);
      CHECK(b.minCoeff() >= 0.0);
    }
  }

  TEST_CASE("basis matches the recursive definition") {
    for (int n_ctrl : {4, 5, 7, 14}) {
      for (int degree : {1, 2, 3}) {
        if (n_ctrl <= degree) continue;
        const auto knots = clamped_uniform_knots(n_ctrl, degree);
        for (double t : {0.0, 0.13, 0.5, 0.77, 0.999, 1.0}) {
          const Eigen::VectorXd b = bspline_basis(t, degree, knots);
          for (int i = 0; i < n_ctrl; ++i) CHECK(b(i) == doctest::Approx(oracle::cox_de_boor(i, degree, t, knots)).epsilon(1e-12));
        }
      }
    }
  }

  TEST_CASE("evaluation reproduces points and lines") {
    const SplineSegment flat(PointList(5, Point(0.3, -1.2)), 3);
    for (double t : {0.0, 0.4, 1.0}) CHECK((flat.eval(t) - Point(0.3, -1.2)).norm() < 1e-12);

    PointList line;
    for (int i = 0; i < 5; ++i) line.emplace_back(0.5 * i, 0.25 * i);
    const SplineSegment s(line, 3);
    CHECK((s.eval(0.5) - Point(1.0, 0.5)).norm() < 1e-12);
    CHECK((s.eval(0.0) - line.front()).norm() == 0.0);
    CHECK((s.eval(1.0) - line.back()).norm() == 0.0);

    const SplineSegment st = SplineSegment::straight(Point(0, 0), Point(3, 4), 5, 3);
    CHECK(is_straight(st));
    CHECK(segment_arc_length(st, 128) == doctest::Approx(5.0).epsilon(1e-12));
    const auto pts = st.sample(5);
    CHECK(pts.size() == 5);
    CHECK((pts[2] - Point(1.5, 2.0)).norm() < 1e-12);
    CHECK_THROWS_AS(SplineSegment(PointList(3, Point(0, 0)), 3), Error);
  }

  TEST_CASE("arc length estimates") {
    std::mt19937_64 rng(12);
    for (int rep = 0; rep < 10; ++rep) {
      PointList c{Point(0, 0)};
      for (int i = 1; i < 4; ++i) c.push_back(Point(0.5 * i, 0) + oracle::uniform_point(rng, -0.1, 0.1));
      c.emplace_back(2.0, 0.0);
      const SplineSegment s(c, 3);
      const double ref = arc_length(dense(s, 200001));
      CHECK(std::abs(segment_arc_length(s, 256) - ref) <= 1e-6 * ref);
      double prev = 0.0;
      for (int m = 16; m <= 1024; m *= 2) {
        const double l = segment_arc_length(s, m);
        CHECK(l >= prev);
        prev = l;
      }
    }

    PointList arc;
    for (int i = 0; i <= 80; ++i) {
      const double a = std::numbers::pi * i / 80;
      arc.emplace_back(std::cos(a), std::sin(a));
    }
    CHECK(std::abs(segment_arc_length(SplineSegment(arc, 3), 256) - std::numbers::pi) <= 1e-3 * std::numbers::pi);
  }

  TEST_CASE("control points stay in their convex hull bounding box") {
    std::mt19937_64 rng(61);
    for (int rep = 0; rep < 50; ++rep) {
      PointList c;
      for (int i = 0; i < 6; ++i) c.push_back(oracle::uniform_point(rng, -1, 1));
      const SplineSegment s(c, 3);
      Eigen::Vector2d lo = c[0];
      Eigen::Vector2d hi = c[0];
      for (const auto& p : c) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
      }
      for (const auto& p : s.sample(50)) {
        CHECK((p - lo).minCoeff() >= -1e-12);
        CHECK((hi - p).minCoeff() >= -1e-12);
      }
    }
  }
}

TEST_SUITE("refine") {
  TEST_CASE("segment objective bounds") {
    const SplineSegment s = SplineSegment::straight(Point(0, 0), Point(1, 0), 5, 3);
    const PointList far{Point(5, 5), Point(-4, 3), Point(6, -2)};
    const double far_obj = segment_objective(s, far, kDesk, 20);
    CHECK(far_obj <= 30.0);
    CHECK(far_obj >= 30.0 - 3 * kDesk.tolerance());

    const PointList one{Point(0.5, 0)};
    const SplineSegment through = SplineSegment::straight(Point(0, 0), Point(1, 0), 5, 3);
    CHECK(segment_objective(through, one, kDesk, 3) <= 10.0 - 100.0 / 10.1 + 1e-12);

    const PointList tests = side_cluster();
    CHECK(segment_objective(s, tests, kDesk, 200) <= segment_objective(s, tests, kDesk, 2) + 1e-12);
  }

  TEST_CASE("a budget equal to the chord keeps the straight segment") {
    const Environment env{Rect{-1, -1, 3, 2}, {}};
    const auto sol = refine_segment(Point(0, 0), Point(2, 0), 2.0, side_cluster(), env, kDesk, 10, RefineConfig{}, 0);
    CHECK(sol.diagnostics.feasible);
    CHECK(sol.diagnostics.objective == doctest::Approx(sol.diagnostics.initial_objective).epsilon(1e-9));
    for (const auto& p : sol.spline.sample(50)) CHECK(std::abs(p.y()) < 1e-9);
  }

  TEST_CASE("generous budget bends toward a side cluster") {
    const Environment env{Rect{-1, -1, 3, 2}, {}};
    const auto sol = refine_segment(Point(0, 0), Point(2, 0), 3.2, side_cluster(), env, kDesk, 10, RefineConfig{}, 0);
    CHECK(sol.diagnostics.feasible);
    CHECK(sol.diagnostics.objective <= 0.95 * sol.diagnostics.initial_objective);
    CHECK(sol.diagnostics.objective == doctest::Approx(segment_objective(sol.spline, side_cluster(), kDesk, 10)).epsilon(1e-12));
    CHECK(segment_arc_length(sol.spline, 128) * 1.002 <= 3.2 + 1e-9);
    // Regression pin from the first verified run.
    CHECK(sol.diagnostics.objective == doctest::Approx(kSideClusterPin).epsilon(1e-6));
  }

  TEST_CASE("obstacles far from the ellipse do not change the result") {
    const PointList tests = side_cluster();
    const Environment near{Rect{-1, -1, 3, 2}, {Disk{Point(1.6, 0.6), 0.15}}};
    Environment with_far = near;
    with_far.obstacles.push_back(Disk{Point(2.7, 1.7), 0.2});
    with_far.obstacles.push_back(ConvexPolygon{{Point(-0.9, 1.2), Point(-0.5, 1.2), Point(-0.7, 1.6)}});
    const auto a = refine_segment(Point(0, 0), Point(2, 0), 2.6, tests, near, kDesk, 10, RefineConfig{}, 3);
    const auto b = refine_segment(Point(0, 0), Point(2, 0), 2.6, tests, with_far, kDesk, 10, RefineConfig{}, 3);
    CHECK(b.diagnostics.pruned_obstacles == 2);
    CHECK(a.spline.control() == b.spline.control());
    CHECK(a.diagnostics.objective == b.diagnostics.objective);
  }

  TEST_CASE("a blocked straight edge is an error naming the obstacle") {
    const Environment env{Rect{-1, -1, 3, 2}, {Disk{Point(1, 0), 0.2}}};
    try {
      refine_segment(Point(0, 0), Point(2, 0), 3.0, side_cluster(), env, kDesk, 10, RefineConfig{}, 0);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("obstacle 0") != std::string::npos);
    }
  }

  TEST_CASE("random single-segment problems stay feasible and never get worse") {
    std::mt19937_64 rng(77);
    RefineConfig cfg;
    for (int rep = 0; rep < 8; ++rep) {
      Environment env{Rect{-1, -1.5, 3, 1.5}, {}};
      while (env.obstacles.size() < 4) {
        std::uniform_real_distribution<double> u(0, 1);
        const Point c(-0.5 + 3.0 * u(rng), -1.2 + 2.4 * u(rng));
        const Disk d{c, 0.1 + 0.2 * u(rng)};
        if (point_segment_distance(d.center, Point(0, 0), Point(2, 0)) > d.radius + 0.05) env.obstacles.push_back(d);
      }
      PointList tests;
      for (int j = 0; j < 10; ++j) tests.push_back(Point(-0.5, -1.2) + oracle::uniform_point(rng, 0, 1).cwiseProduct(Point(3.0, 2.4)));
      const double budget = 2.0 * (1.0 + 0.6 * std::uniform_real_distribution<double>(0, 1)(rng));
      const auto sol = refine_segment(Point(0, 0), Point(2, 0), budget, tests, env, kDesk, 12, cfg, rep);
      CHECK(sol.diagnostics.feasible);
      CHECK(sol.diagnostics.objective <= sol.diagnostics.initial_objective + 1e-12);
      const SegmentCheck chk = check_segment(sol.spline, budget, env.obstacles, env.workspace, cfg, 12);
      CHECK(chk.feasible);
      CHECK(chk.min_obstacle_clearance >= -1e-9);
      CHECK(chk.guarded_length <= budget + 1e-9);
      CHECK((sol.spline.eval(0.0) - Point(0, 0)).norm() == 0.0);
      CHECK((sol.spline.eval(1.0) - Point(2, 0)).norm() == 0.0);
      const Ellipse e(Point(0, 0), Point(2, 0), budget);
      for (const auto& p : sol.spline.sample(12)) CHECK(ellipse_contains(e, p));
      for (const auto& p : sol.spline.sample(12)) CHECK(signed_distance(p, env.obstacles) >= -1e-9);
    }
  }

  TEST_CASE("configuration validation") {
    RefineConfig bad;
    bad.n_env = 1;
    CHECK_THROWS_AS(bad.validate(), Error);
    RefineConfig neg;
    neg.inner_tol = 0.0;
    CHECK_THROWS_AS(neg.validate(), Error);
    CHECK_NOTHROW(RefineConfig{}.validate());
  }
}

TEST_SUITE("trajectory") {
  TEST_CASE("measurement distribution by largest remainder") {
    const std::vector<double> even{1.0, 1.0, 1.0};
    CHECK(distribute_measurements(even, 9) == std::vector<int>{3, 3, 3});
    const std::vector<double> skew{2.0, 1.0, 1.0};
    CHECK(distribute_measurements(skew, 8) == std::vector<int>{4, 2, 2});
    const std::vector<double> single{3.7};
    CHECK(distribute_measurements(single, 40) == std::vector<int>{40});
    const std::vector<double> lopsided{100.0, 0.1};
    const auto c = distribute_measurements(lopsided, 10);
    CHECK(c[1] >= 2);
    CHECK(c[0] + c[1] == 10);
    CHECK_THROWS_AS(distribute_measurements(even, 5), Error);
  }

  TEST_CASE("assembly of one and two segments") {
    const PointList tests = side_cluster();
    const SplineSegment a = SplineSegment::straight(Point(0, 0), Point(2, 0), 5, 3);
    const std::vector<double> alloc1{2.0};
    const auto one = assemble_trajectory({a}, alloc1, tests, kDesk, 10, 2.5);
    CHECK(one.objective == doctest::Approx(segment_objective(a, tests, kDesk, 10)).epsilon(1e-12));
    CHECK(one.total_length == doctest::Approx(2.0));

    const SplineSegment b = SplineSegment::straight(Point(2, 0), Point(2, 5), 5, 3);
    const std::vector<double> alloc2{2.0, 5.0};
    const auto two = assemble_trajectory({a, b}, alloc2, tests, kDesk, 20, 7.0);
    CHECK(two.objective <= std::min(two.segment_objectives[0], two.segment_objectives[1]) + 1e-12);
    PointList all = two.trajectory.measurements();
    CHECK(two.objective == doctest::Approx(oracle::posterior_trace(tests, all, 0.35, 10.0, 0.1)).epsilon(1e-9));

    const SplineSegment gap = SplineSegment::straight(Point(2.1, 0), Point(2, 5), 5, 3);
    CHECK_THROWS_AS(assemble_trajectory({a, gap}, alloc2, tests, kDesk, 20, 7.0), Error);
    const std::vector<double> over{2.0, 5.5};
    CHECK_THROWS_AS(assemble_trajectory({a, b}, over, tests, kDesk, 20, 7.0), Error);
  }

  TEST_CASE("validator flags collisions and overlong trajectories") {
    Trajectory t;
    t.segments.push_back(SplineSegment::straight(Point(0, 0), Point(2, 0), 5, 3));
    t.measurement_t.push_back({0.0, 0.5, 1.0});
    t.measurement_points.push_back({Point(0, 0), Point(1, 0), Point(2, 0)});
    const Environment clear{Rect{-1, -1, 3, 1}, {}};
    CHECK(validate_trajectory(t, clear, Point(0, 0), Point(2, 0), 2.5).feasible);
    CHECK_FALSE(validate_trajectory(t, clear, Point(0, 0), Point(2, 0), 1.9).feasible);
    const Environment blocked{Rect{-1, -1, 3, 1}, {Disk{Point(1, 0.1), 0.2}}};
    const auto chk = validate_trajectory(t, blocked, Point(0, 0), Point(2, 0), 2.5);
    CHECK_FALSE(chk.feasible);
    CHECK(chk.worst_obstacle == 0);
    CHECK_FALSE(chk.reason.empty());
  }
}
