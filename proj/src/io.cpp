#include "hipp/io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "hipp/error.hpp"

namespace hipp {

namespace {

[[noreturn]] void schema_error(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::Validation, where + ": " + what);
}

void require_keys(const Json& j, const std::string& where, const std::set<std::string>& required,
                  const std::set<std::string>& optional = {}) {
  if (!j.is_object()) schema_error(where, "expected an object");
  for (const auto& [key, _] : j.items()) {
    if (!required.count(key) && !optional.count(key)) schema_error(where + "." + key, "unknown field");
  }
  for (const auto& key : required) {
    if (!j.contains(key)) schema_error(where + "." + key, "missing field");
  }
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) schema_error(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) schema_error(where, "expected a finite number");
  return v;
}

long long integer(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) schema_error(where, "expected an integer");
  return j.get<long long>();
}

std::size_t index(const Json& j, const std::string& where) {
  const long long v = integer(j, where);
  if (v < 0) schema_error(where, "expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

Point point(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) schema_error(where, "expected [x, y]");
  return {number(j[0], where + "[0]"), number(j[1], where + "[1]")};
}

PointList points(const Json& j, const std::string& where) {
  if (!j.is_array()) schema_error(where, "expected an array of points");
  PointList out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(point(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

Rect rect(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 4) schema_error(where, "expected [xmin, ymin, xmax, ymax]");
  Rect r{number(j[0], where + "[0]"), number(j[1], where + "[1]"), number(j[2], where + "[2]"),
         number(j[3], where + "[3]")};
  if (!(r.xmax > r.xmin && r.ymax > r.ymin)) schema_error(where, "extent must have xmax > xmin and ymax > ymin");
  return r;
}

Json to_json(const Point& p) { return Json::array({p.x(), p.y()}); }

Json to_json(const PointList& ps) {
  Json out = Json::array();
  for (const auto& p : ps) out.push_back(to_json(p));
  return out;
}

Json to_json(const Rect& r) { return Json::array({r.xmin, r.ymin, r.xmax, r.ymax}); }

Obstacle obstacle(const Json& j, const std::string& where) {
  if (!j.is_object() || j.size() != 1) schema_error(where, "expected {\"disk\": ...} or {\"polygon\": ...}");
  if (j.contains("disk")) {
    const Json& d = j["disk"];
    const std::string w = where + ".disk";
    require_keys(d, w, {"center", "radius"});
    const double r = number(d["radius"], w + ".radius");
    if (!(r > 0.0)) schema_error(w + ".radius", "must be > 0");
    return Disk{point(d["center"], w + ".center"), r};
  }
  if (j.contains("polygon")) {
    const Json& p = j["polygon"];
    const std::string w = where + ".polygon";
    require_keys(p, w, {"vertices"});
    ConvexPolygon poly{points(p["vertices"], w + ".vertices")};
    try {
      validate_obstacle(poly);
    } catch (const Error& e) {
      schema_error(w + ".vertices", e.what());
    }
    return poly;
  }
  schema_error(where, "expected {\"disk\": ...} or {\"polygon\": ...}");
}

Json to_json(const Obstacle& o) {
  if (const auto* d = std::get_if<Disk>(&o)) {
    return Json{{"disk", {{"center", to_json(d->center)}, {"radius", d->radius}}}};
  }
  return Json{{"polygon", {{"vertices", to_json(std::get<ConvexPolygon>(o).vertices)}}}};
}

}  // namespace

FieldGrid field_grid_from_json(const Json& j, const std::string& where) {
  require_keys(j, where, {"extent", "nx", "ny", "values", "semantics"});
  FieldGrid g;
  g.extent = rect(j["extent"], where + ".extent");
  g.nx = static_cast<int>(integer(j["nx"], where + ".nx"));
  g.ny = static_cast<int>(integer(j["ny"], where + ".ny"));
  if (!j["values"].is_array()) schema_error(where + ".values", "expected an array of numbers");
  for (std::size_t k = 0; k < j["values"].size(); ++k) {
    g.values.push_back(number(j["values"][k], where + ".values[" + std::to_string(k) + "]"));
  }
  if (!j["semantics"].is_string()) schema_error(where + ".semantics", "expected \"importance\" or \"truth\"");
  try {
    g.semantics = field_semantics_from_string(j["semantics"].get<std::string>());
  } catch (const Error& e) {
    schema_error(where + ".semantics", e.what());
  }
  try {
    g.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::Validation, where + ": " + e.what());
  }
  return g;
}

Json to_json(const FieldGrid& g) {
  return Json{{"extent", to_json(g.extent)},
              {"nx", g.nx},
              {"ny", g.ny},
              {"values", g.values},
              {"semantics", to_string(g.semantics)}};
}

Scenario scenario_from_json(const Json& j, const std::filesystem::path& base_dir) {
  require_keys(j, "$",
               {"schema_version", "workspace", "obstacles", "graph", "kernel", "budget", "start",
                "goal", "n_measurements"},
               {"test_points", "test_sampling", "truth"});
  if (integer(j["schema_version"], "$.schema_version") != kScenarioSchemaVersion) {
    schema_error("$.schema_version", "unsupported version (expected 1)");
  }
  Scenario sc;
  sc.env.workspace = rect(j["workspace"], "$.workspace");
  if (!j["obstacles"].is_array()) schema_error("$.obstacles", "expected an array");
  for (std::size_t i = 0; i < j["obstacles"].size(); ++i) {
    sc.env.obstacles.push_back(obstacle(j["obstacles"][i], "$.obstacles[" + std::to_string(i) + "]"));
  }

  const Json& gj = j["graph"];
  require_keys(gj, "$.graph", {"vertices", "edges"});
  PointList vertices = points(gj["vertices"], "$.graph.vertices");
  if (!gj["edges"].is_array()) schema_error("$.graph.edges", "expected an array of [i, j]");
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t k = 0; k < gj["edges"].size(); ++k) {
    const std::string w = "$.graph.edges[" + std::to_string(k) + "]";
    const Json& e = gj["edges"][k];
    if (!e.is_array() || e.size() != 2) schema_error(w, "expected [i, j]");
    edges.emplace_back(index(e[0], w + "[0]"), index(e[1], w + "[1]"));
  }
  sc.graph = InformativeGraph(std::move(vertices), edges);

  const Json& kj = j["kernel"];
  require_keys(kj, "$.kernel", {"lengthscale", "signal_variance", "noise_variance"},
               {"influence_tolerance"});
  sc.kernel.lengthscale = number(kj["lengthscale"], "$.kernel.lengthscale");
  sc.kernel.signal_variance = number(kj["signal_variance"], "$.kernel.signal_variance");
  sc.kernel.noise_variance = number(kj["noise_variance"], "$.kernel.noise_variance");
  if (kj.contains("influence_tolerance")) {
    sc.kernel.influence_tolerance = number(kj["influence_tolerance"], "$.kernel.influence_tolerance");
  }

  sc.budget = number(j["budget"], "$.budget");
  sc.start = index(j["start"], "$.start");
  sc.goal = index(j["goal"], "$.goal");
  sc.n_measurements = static_cast<int>(integer(j["n_measurements"], "$.n_measurements"));

  const bool explicit_tests = j.contains("test_points");
  if (explicit_tests == j.contains("test_sampling")) {
    schema_error("$", "exactly one of test_points and test_sampling is required");
  }
  if (j.contains("truth")) {
    if (!j["truth"].is_string()) schema_error("$.truth", "expected a file path");
    sc.truth = j["truth"].get<std::string>();
    sc.truth_grid = load_field_grid(base_dir / *sc.truth);
  }
  if (explicit_tests) {
    sc.test_points = points(j["test_points"], "$.test_points");
  } else {
    const Json& ts = j["test_sampling"];
    require_keys(ts, "$.test_sampling", {"importance", "m", "seed"});
    if (!ts["importance"].is_string()) schema_error("$.test_sampling.importance", "expected a file path");
    TestSampling s;
    s.importance = ts["importance"].get<std::string>();
    s.m = static_cast<int>(integer(ts["m"], "$.test_sampling.m"));
    s.seed = static_cast<std::uint64_t>(index(ts["seed"], "$.test_sampling.seed"));
    sc.sampling = s;
    sc.importance_grid = load_field_grid(base_dir / s.importance);
    if (sc.importance_grid->semantics != FieldSemantics::Importance) {
      schema_error("$.test_sampling.importance", "grid semantics must be \"importance\"");
    }
    sc.env.validate();
    if (s.m < 1) schema_error("$.test_sampling.m", "must be >= 1");
    sc.test_points = sample_test_points(*sc.importance_grid, sc.env, s.m, s.seed);
  }
  sc.validate();
  return sc;
}

Json to_json(const Scenario& sc) {
  Json j;
  j["schema_version"] = kScenarioSchemaVersion;
  j["workspace"] = to_json(sc.env.workspace);
  j["obstacles"] = Json::array();
  for (const auto& o : sc.env.obstacles) j["obstacles"].push_back(to_json(o));
  Json edges = Json::array();
  for (const auto& e : sc.graph.edges()) edges.push_back(Json::array({e.a, e.b}));
  j["graph"] = Json{{"vertices", to_json(sc.graph.vertices())}, {"edges", edges}};
  j["kernel"] = Json{{"lengthscale", sc.kernel.lengthscale},
                     {"signal_variance", sc.kernel.signal_variance},
                     {"noise_variance", sc.kernel.noise_variance}};
  if (sc.kernel.influence_tolerance) j["kernel"]["influence_tolerance"] = *sc.kernel.influence_tolerance;
  j["budget"] = sc.budget;
  j["start"] = sc.start;
  j["goal"] = sc.goal;
  j["n_measurements"] = sc.n_measurements;
  if (sc.sampling) {
    j["test_sampling"] = Json{{"importance", sc.sampling->importance},
                              {"m", sc.sampling->m},
                              {"seed", sc.sampling->seed}};
  } else {
    j["test_points"] = to_json(sc.test_points);
  }
  if (sc.truth) j["truth"] = *sc.truth;
  return j;
}

std::string canonical_dump(const Json& j) { return j.dump(2) + "\n"; }

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

namespace {

Json parse_file(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::Validation, path.string() + ": malformed JSON: " + e.what());
  }
}

}  // namespace

Scenario load_scenario(const std::filesystem::path& path) {
  return scenario_from_json(parse_file(path), path.parent_path());
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  write_text(path, canonical_dump(to_json(scenario)));
}

FieldGrid load_field_grid(const std::filesystem::path& path) {
  try {
    return field_grid_from_json(parse_file(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Io) throw;
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void save_field_grid(const FieldGrid& grid, const std::filesystem::path& path) {
  write_text(path, canonical_dump(to_json(grid)));
}

}  // namespace hipp
