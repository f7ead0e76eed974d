#pragma once

// Seeded scenario generators: the cluttered desk-scale benchmark and a larger
// archipelago-style scene with importance and truth grids.

#include <cstdint>

#include "hipp/field.hpp"
#include "hipp/scenario.hpp"

namespace hipp {

struct BenchmarkConfig {
  double workspace_size = 3.5;
  int n_obstacles = 12;
  int n_vertices = 11;
  int n_edges = 22;
  int m = 35;
  double budget = 14.0;
  double min_separation = 1.0;  // between start and goal
  int n_measurements = 40;
  KernelParams kernel{0.35, 10.0, 0.1, std::nullopt};

  double obstacle_min_radius = 0.15;
  double obstacle_max_radius = 0.38;
  double obstacle_gap = 0.12;     // free corridor kept between obstacles and walls
  double vertex_clearance = 0.06;
  double vertex_spacing = 0.45;
  double edge_clearance = 0.02;
  int neighbours = 5;             // candidate edges per vertex
  int max_retries = 200;
};

/// Deterministic in (config, seed). Throws Error(Generation) when placement
/// keeps failing. The result passes Scenario::validate().
Scenario generate_benchmark(const BenchmarkConfig& config, std::uint64_t seed);

struct ArcticScene {
  Scenario scenario;   // tests drawn from the importance grid
  FieldGrid importance;
  FieldGrid truth;
};

/// Archipelago-style demo: many convex islands, a smooth truth field in [0, 1]
/// and an importance field concentrated in a few channels. `budget` sets the
/// scenario budget; grids are referenced as importance.json and truth.json.
ArcticScene generate_arctic(std::uint64_t seed, double budget);

}  // namespace hipp
