#pragma once

// Planner settings shared by the CLI and the benchmark harness, with a TOML
// overlay on top of the built-in defaults.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "hipp/baselines.hpp"
#include "hipp/hierarchical.hpp"

namespace hipp {

struct PlannerConfig {
  HierConfig hier;
  ContinuousConfig continuous;

  void validate() const;
};

/// Applies a TOML document to the defaults. Recognised tables: [graph],
/// [allocation], [refine], [hier], [cmaes], [gradient]. Unknown tables or keys
/// and mistyped values throw Error(Validation) naming "table.key".
PlannerConfig planner_config_from_toml(const std::string& text, const std::string& source = "config");

PlannerConfig load_planner_config(const std::filesystem::path& path);

/// Every setting, for echoing into plan reports.
nlohmann::json to_json(const PlannerConfig& config);

}  // namespace hipp
