#pragma once

// JSON scenario and field-grid files. Objects are written with sorted keys and
// shortest round-trip number formatting, so save(load(f)) reproduces a
// canonical file byte for byte.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "hipp/field.hpp"
#include "hipp/scenario.hpp"

namespace hipp {

using Json = nlohmann::json;

inline constexpr int kScenarioSchemaVersion = 1;

/// Throws Error(Validation) with a field path such as "$.obstacles[2].disk.radius".
FieldGrid field_grid_from_json(const Json& j, const std::string& where = "$");
Json to_json(const FieldGrid& grid);

/// Parses and validates a scenario; grid references resolve against base_dir
/// and sampled test points are drawn here.
Scenario scenario_from_json(const Json& j, const std::filesystem::path& base_dir);
Json to_json(const Scenario& scenario);

Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

FieldGrid load_field_grid(const std::filesystem::path& path);
void save_field_grid(const FieldGrid& grid, const std::filesystem::path& path);

/// Canonical text: two-space indent, trailing newline.
std::string canonical_dump(const Json& j);

std::string read_text(const std::filesystem::path& path);
/// Writes via a temporary file and rename. Throws Error(Io).
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace hipp
