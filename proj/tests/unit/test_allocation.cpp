#include <doctest.h>

#include <cmath>
#include <random>

#include "hipp/allocation.hpp"
#include "hipp/error.hpp"
#include "oracles.hpp"

using namespace hipp;

namespace {

using Edges = std::vector<std::pair<Point, Point>>;

const Edges kLine3{{Point(0, 0), Point(1, 0)}, {Point(1, 0), Point(2, 0)}, {Point(2, 0), Point(3, 0)}};

/// Coverage computed straight from the sigmoid and union definitions.
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

AllocationProblem random_problem(std::mt19937_64& rng, int n_edges, int m) {
  Edges edges;
  Point at = oracle::uniform_point(rng, 0, 1);
  for (int e = 0; e < n_edges; ++e) {
    const Point next = at + oracle::uniform_point(rng, -0.8, 0.8);
    edges.emplace_back(at, next);
    at = next;
  }
  PointList tests;
  for (int j = 0; j < m; ++j) tests.push_back(oracle::uniform_point(rng, -1, 2.5));
  double geo = 0.0;
  for (const auto& [u, v] : edges) geo += (u - v).norm();
  std::uniform_real_distribution<double> f(1.1, 2.0);
  return AllocationProblem::make(edges, tests, geo * f(rng), 0.2, 6.0);
}

}  // namespace

TEST_SUITE("allocation") {
  TEST_CASE("coverage sigmoid") {
    CHECK(coverage_sigmoid(1.0, 1.0 + 2 * 0.3, 0.3, 10.0) == doctest::Approx(0.5));
    CHECK(coverage_sigmoid(1.0, 1.7, 0.3, 10.0) == doctest::Approx(1.0 / (1.0 + std::exp(1.0))));
    CHECK(coverage_sigmoid(1.0, 1.7, 0.3, 10.0) == doctest::Approx(0.26894).epsilon(1e-5));
    CHECK(coverage_sigmoid(1e6, 1.0, 0.3, 10.0) == 1.0);
    CHECK(coverage_sigmoid(1.0, 1e6, 0.3, 10.0) >= 0.0);
    CHECK(coverage_sigmoid(1.0, 1e6, 0.3, 10.0) < 1e-200);
    double prev = 0.0;
    for (double l = 0.0; l < 4.0; l += 0.05) {
      const double s = coverage_sigmoid(l, 2.0, 0.3, 10.0);
      CHECK(s >= prev);
      prev = s;
    }
  }

  TEST_CASE("coverage union") {
    const std::vector<double> one{0.3};
    CHECK(coverage_union(one) == doctest::Approx(0.3));
    const std::vector<double> halves{0.5, 0.5};
    CHECK(coverage_union(halves) == doctest::Approx(0.75));
    const std::vector<double> sure{0.2, 1.0, 0.1};
    CHECK(coverage_union(sure) == 1.0);
  }

  TEST_CASE("problem construction") {
    const auto p = AllocationProblem::make(kLine3, {Point(0.5, 1.0)}, 4.0, 0.2, 10.0);
    CHECK(p.focal(1, 0) == doctest::Approx((Point(0.5, 1) - Point(1, 0)).norm() + (Point(0.5, 1) - Point(2, 0)).norm()));
    CHECK(p.geometric_lengths().sum() == doctest::Approx(3.0));
    CHECK_THROWS_AS(AllocationProblem::make(kLine3, {Point(0, 1)}, 2.5, 0.2, 10.0), InfeasibleError);
    CHECK_THROWS_AS(AllocationProblem::make(kLine3, {Point(0, 1)}, 4.0, 0.2, 0.0), Error);
  }

  TEST_CASE("objective at saturation and single-edge gradient") {
    const auto sat = AllocationProblem::make(kLine3, {Point(0.5, 0.2), Point(2.5, 0.1)}, 100.0, 0.2, 10.0);
    const Eigen::VectorXd big = Eigen::VectorXd::Constant(3, 30.0);
    const auto v = allocation_objective(big, sat);
    CHECK(v.value == doctest::Approx(2.0));
    CHECK(v.gradient.cwiseAbs().maxCoeff() < 1e-9);

    const Edges one{{Point(0, 0), Point(1, 0)}};
    const auto p = AllocationProblem::make(one, {Point(0.5, 1.0)}, 5.0, 0.2, 10.0);
    for (double l : {1.0, 1.5, p.focal(0, 0) - 0.4, 3.0}) {
      Eigen::VectorXd x(1);
      x << l;
      const auto r = allocation_objective(x, p);
      const double s = coverage_sigmoid(l, p.focal(0, 0), 0.2, 10.0);
      CHECK(r.value == doctest::Approx(s));
      CHECK(r.gradient(0) == doctest::Approx(10.0 * s * (1 - s)));
    }
  }

  TEST_CASE("analytic gradient matches central differences") {
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 50; ++rep) {
      const auto p = random_problem(rng, 2 + static_cast<int>(rng() % 4), 12);
      const Eigen::VectorXd l = initial_allocation(p);
      const auto v = allocation_objective(l, p);
      CHECK(v.value == doctest::Approx(coverage_by_hand(l, p)).epsilon(1e-12));
      const double h = 1e-6 * std::max(1.0, l.cwiseAbs().maxCoeff());
      for (Eigen::Index e = 0; e < l.size(); ++e) {
        Eigen::VectorXd a = l;
        Eigen::VectorXd b = l;
        a(e) += h;
        b(e) -= h;
        const double fd = (coverage_by_hand(a, p) - coverage_by_hand(b, p)) / (2 * h);
        CHECK(v.gradient(e) >= 0.0);
        CHECK(std::abs(v.gradient(e) - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
      }
    }
  }

  TEST_CASE("projection onto the budget polytope") {
    Eigen::VectorXd lb(2);
    lb << 1.0, 1.0;
    Eigen::VectorXd feasible(2);
    feasible << 1.5, 1.2;
    CHECK(project_feasible(feasible, lb, 3.0) == feasible);

    Eigen::VectorXd over(2);
    over << 3.0, 3.0;
    const Eigen::VectorXd even = project_feasible(over, lb, 4.0);
    CHECK(even(0) == doctest::Approx(2.0));
    CHECK(even(1) == doctest::Approx(2.0));

    Eigen::VectorXd skew(2);
    skew << 3.0, 1.2;
    const Eigen::VectorXd clipped = project_feasible(skew, lb, 3.0);
    CHECK(clipped(0) == doctest::Approx(2.0));
    CHECK(clipped(1) == doctest::Approx(1.0));

    Eigen::VectorXd low(2);
    low << 0.2, 0.5;
    CHECK(project_feasible(low, lb, 3.0) == lb);

    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-2, 4);
    for (int rep = 0; rep < 200; ++rep) {
      Eigen::VectorXd x(4);
      Eigen::VectorXd lo(4);
      for (int i = 0; i < 4; ++i) {
        x(i) = u(rng);
        lo(i) = 0.5 * std::abs(u(rng));
      }
      const double budget = lo.sum() + std::abs(u(rng));
      const Eigen::VectorXd p = project_feasible(x, lo, budget);
      CHECK((p - lo).minCoeff() >= -1e-12);
      CHECK(p.sum() <= budget + 1e-9);
      CHECK((project_feasible(p, lo, budget) - p).cwiseAbs().maxCoeff() < 1e-12);
      // Projection property: <x - p, q - p> <= 0 for feasible q.
      for (int k = 0; k < 5; ++k) {
        Eigen::VectorXd q = lo;
        q(static_cast<Eigen::Index>(rng() % 4)) += (budget - lo.sum()) * 0.9;
        CHECK((x - p).dot(q - p) <= 1e-9);
      }
    }
  }

  TEST_CASE("a single edge receives the whole budget") {
    const Edges one{{Point(0, 0), Point(1, 0)}};
    const auto a = solve_allocation(AllocationProblem::make(one, {Point(0.5, 2.0)}, 3.0, 0.2, 10.0));
    CHECK(a.lengths(0) == doctest::Approx(3.0).epsilon(1e-9));
  }

  TEST_CASE("symmetric edges split evenly") {
    const Edges two{{Point(0, 0), Point(1, 0)}, {Point(1, 0), Point(2, 0)}};
    const PointList tests{Point(0.5, 0.55), Point(1.5, 0.55), Point(0.5, -0.55), Point(1.5, -0.55)};
    const auto a = solve_allocation(AllocationProblem::make(two, tests, 3.0, 0.2, 10.0));
    CHECK(std::abs(a.lengths(0) - a.lengths(1)) < 1e-6);
  }

  TEST_CASE("three-edge toys match a grid search") {
    std::mt19937_64 rng(21);
    for (int rep = 0; rep < 6; ++rep) {
      PointList tests;
      std::normal_distribution<double> nd(0.0, 0.25);
      for (int j = 0; j < 8; ++j) tests.emplace_back(1.5 + nd(rng), 0.9 + nd(rng));
      for (int j = 0; j < 4; ++j) tests.push_back(oracle::uniform_point(rng, -0.5, 3.5));
      const double budget = 4.0 + 0.1 * rep;
      const auto p = AllocationProblem::make(kLine3, tests, budget, 0.2, 10.0);

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
      CHECK(a.coverage >= 0.99 * best);
      CHECK(a.coverage == doctest::Approx(coverage_by_hand(a.lengths, p)).epsilon(1e-12));
      CHECK(a.coverage >= allocation_objective(initial_allocation(p), p).value - 1e-12);

      REQUIRE_FALSE(a.iterates.empty());
      for (const auto& l : a.iterates) {
        CHECK((l - p.geometric_lengths()).minCoeff() >= -1e-12);
        CHECK(l.sum() <= budget + 1e-6);
      }
      for (std::size_t k = 1; k < a.objective_history.size(); ++k) {
        CHECK(a.objective_history[k] >= a.objective_history[k - 1] - 1e-12);
      }
    }
  }

  TEST_CASE("solver output is feasible and deterministic on random problems") {
    std::mt19937_64 rng(34);
    for (int rep = 0; rep < 20; ++rep) {
      const auto p = random_problem(rng, 2 + static_cast<int>(rng() % 5), 15);
      AllocationConfig cfg;
      cfg.seed = rep;
      const Allocation a = solve_allocation(p, cfg);
      CHECK((a.lengths - p.geometric_lengths()).minCoeff() >= -1e-12);
      CHECK(a.lengths.sum() <= p.budget + 1e-6);
      CHECK(solve_allocation(p, cfg).lengths == a.lengths);
    }
  }

  TEST_CASE("increasing one length never lowers any coverage") {
    std::mt19937_64 rng(55);
    for (int rep = 0; rep < 50; ++rep) {
      const auto p = random_problem(rng, 3, 10);
      Eigen::VectorXd l = initial_allocation(p);
      std::vector<double> before;
      for (std::size_t j = 0; j < p.tests.size(); ++j) {
        std::vector<double> s;
        for (std::size_t e = 0; e < p.edges.size(); ++e) s.push_back(coverage_sigmoid(l(e), p.focal(e, j), p.r_kernel, p.alpha));
        before.push_back(coverage_union(s));
      }
      l(static_cast<Eigen::Index>(rng() % 3)) += 0.3;
      for (std::size_t j = 0; j < p.tests.size(); ++j) {
        std::vector<double> s;
        for (std::size_t e = 0; e < p.edges.size(); ++e) s.push_back(coverage_sigmoid(l(e), p.focal(e, j), p.r_kernel, p.alpha));
        CHECK(coverage_union(s) >= before[j]);
      }
    }
  }

  TEST_CASE("sharp sigmoids count covered points") {
    std::mt19937_64 rng(89);
    int tested = 0;
    for (int rep = 0; rep < 60 && tested < 15; ++rep) {
      auto p = random_problem(rng, 3, 10);
      p = AllocationProblem::make(p.edges, p.tests, p.budget, p.r_kernel, 1000.0);
      const Allocation a = solve_allocation(p);
      bool degenerate = false;
      int count = 0;
      for (std::size_t j = 0; j < p.tests.size(); ++j) {
        bool covered = false;
        for (std::size_t e = 0; e < p.edges.size(); ++e) {
          const double gap = p.focal(e, j) - a.lengths(e) - 2 * p.r_kernel;
          if (std::abs(gap) < 1e-3) degenerate = true;
          covered = covered || gap <= 0;
        }
        count += covered ? 1 : 0;
      }
      if (degenerate) continue;
      CHECK(std::abs(a.coverage - count) < 0.5);
      ++tested;
    }
    CHECK(tested >= 5);
  }
}
