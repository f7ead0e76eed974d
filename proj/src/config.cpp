#include "hipp/config.hpp"

#include <set>
#include <sstream>

#include <toml.hpp>

#include "hipp/error.hpp"
#include "hipp/io.hpp"

namespace hipp {

namespace {

class TableReader {
 public:
  TableReader(const toml::table& table, std::string name, std::ostringstream& errors)
      : table_(table), name_(std::move(name)), errors_(errors) {}

  void get(const char* key, double& out) {
    if (const auto* node = find(key)) {
      if (const auto v = node->value_exact<double>()) {
        out = *v;
      } else if (const auto i = node->value_exact<std::int64_t>()) {
        out = static_cast<double>(*i);
      } else {
        bad(key, "a number");
      }
    }
  }

  void get(const char* key, std::optional<double>& out) {
    if (find(key)) {
      double v = 0.0;
      get(key, v);
      out = v;
    }
  }

  void get(const char* key, int& out) {
    if (const auto* node = find(key)) {
      if (const auto v = node->value_exact<std::int64_t>()) {
        out = static_cast<int>(*v);
      } else {
        bad(key, "an integer");
      }
    }
  }

  void get(const char* key, long& out) {
    if (const auto* node = find(key)) {
      if (const auto v = node->value_exact<std::int64_t>()) {
        out = static_cast<long>(*v);
      } else {
        bad(key, "an integer");
      }
    }
  }

  void get(const char* key, bool& out) {
    if (const auto* node = find(key)) {
      if (const auto v = node->value_exact<bool>()) {
        out = *v;
      } else {
        bad(key, "a boolean");
      }
    }
  }

  void finish() {
    for (const auto& [k, v] : table_) {
      if (!known_.count(std::string(k.str()))) errors_ << name_ << "." << k.str() << ": unknown key; ";
    }
  }

 private:
  const toml::node* find(const char* key) {
    known_.insert(key);
    return table_.get(key);
  }

  void bad(const char* key, const char* want) { errors_ << name_ << "." << key << ": expected " << want << "; "; }

  const toml::table& table_;
  std::string name_;
  std::ostringstream& errors_;
  std::set<std::string> known_;
};

void read_refine(TableReader& r, RefineConfig& c) {
  r.get("n_ctrl", c.n_ctrl);
  r.get("degree", c.degree);
  r.get("n_env", c.n_env);
  r.get("n_obs", c.n_obs);
  r.get("m_quad", c.m_quad);
  r.get("length_guard", c.length_guard);
  r.get("clearance", c.clearance);
  r.get("prune_margin", c.prune_margin);
  r.get("al_rounds", c.al_rounds);
  r.get("penalty_growth", c.penalty_growth);
  r.get("inner_iters", c.inner_iters);
  r.get("inner_tol", c.inner_tol);
  r.get("fd_step", c.fd_step);
  r.get("exchange_rounds", c.exchange_rounds);
  r.get("perturbed_starts", c.perturbed_starts);
  r.get("perturb_scale", c.perturb_scale);
  r.get("validate_intervals", c.validate_intervals);
  r.get("sequential_conditioning", c.sequential_conditioning);
}

nlohmann::json refine_json(const RefineConfig& c) {
  nlohmann::json j;
  j["n_ctrl"] = c.n_ctrl;
  j["degree"] = c.degree;
  j["n_env"] = c.n_env;
  j["n_obs"] = c.n_obs;
  j["m_quad"] = c.m_quad;
  j["length_guard"] = c.length_guard;
  j["clearance"] = c.clearance;
  j["prune_margin"] = c.prune_margin ? nlohmann::json(*c.prune_margin) : nlohmann::json(nullptr);
  j["al_rounds"] = c.al_rounds;
  j["penalty_growth"] = c.penalty_growth;
  j["inner_iters"] = c.inner_iters;
  j["inner_tol"] = c.inner_tol;
  j["fd_step"] = c.fd_step;
  j["exchange_rounds"] = c.exchange_rounds;
  j["perturbed_starts"] = c.perturbed_starts;
  j["perturb_scale"] = c.perturb_scale;
  j["validate_intervals"] = c.validate_intervals;
  j["sequential_conditioning"] = c.sequential_conditioning;
  return j;
}

}  // namespace

void PlannerConfig::validate() const {
  hier.validate();
  continuous.validate();
}

PlannerConfig planner_config_from_toml(const std::string& text, const std::string& source) {
  toml::table doc;
  try {
    doc = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << source << ":" << e.source().begin.line << ":" << e.source().begin.column << ": "
        << e.description();
    throw Error(ErrorKind::Validation, msg.str());
  }

  PlannerConfig c;
  std::ostringstream errors;
  const std::set<std::string> tables{"graph", "allocation", "refine", "hier", "cmaes", "gradient"};
  for (const auto& [k, v] : doc) {
    const std::string name(k.str());
    if (!tables.count(name)) {
      errors << name << ": unknown table; ";
    } else if (!v.is_table()) {
      errors << name << ": expected a table; ";
    }
  }
  auto with = [&](const char* name, auto&& fill) {
    if (const auto* t = doc.get_as<toml::table>(name)) {
      TableReader r(*t, name, errors);
      fill(r);
      r.finish();
    }
  };
  with("graph", [&](TableReader& r) { r.get("allow_revisits", c.hier.graph.allow_revisits); });
  with("allocation", [&](TableReader& r) {
    r.get("max_iters", c.hier.allocation.max_iters);
    r.get("tol", c.hier.allocation.tol);
    r.get("armijo_c", c.hier.allocation.armijo_c);
    r.get("perturbed_starts", c.hier.allocation.perturbed_starts);
    r.get("alpha", c.hier.alpha);
  });
  with("refine", [&](TableReader& r) { read_refine(r, c.hier.refine); });
  with("hier", [&](TableReader& r) { r.get("threads", c.hier.threads); });
  with("cmaes", [&](TableReader& r) {
    auto& cc = c.continuous;
    r.get("n_ctrl", cc.n_ctrl);
    r.get("degree", cc.degree);
    r.get("clearance", cc.clearance);
    r.get("lambda", cc.cmaes.lambda);
    r.get("max_iters", cc.cmaes.max_iters);
    r.get("max_evals", cc.cmaes.max_evals);
    r.get("tol_x", cc.cmaes.tol_x);
    r.get("sigma0_scale", cc.sigma0_scale);
    r.get("budget_penalty", cc.budget_penalty);
    r.get("obstacle_penalty", cc.obstacle_penalty);
    r.get("workspace_penalty", cc.workspace_penalty);
    r.get("check_samples", cc.check_samples);
    r.get("m_quad", cc.m_quad);
  });
  with("gradient", [&](TableReader& r) { read_refine(r, c.continuous.gradient); });

  if (!errors.str().empty()) throw Error(ErrorKind::Validation, source + ": " + errors.str());
  c.validate();
  return c;
}

PlannerConfig load_planner_config(const std::filesystem::path& path) {
  return planner_config_from_toml(read_text(path), path.string());
}

nlohmann::json to_json(const PlannerConfig& c) {
  nlohmann::json j;
  j["graph"]["allow_revisits"] = c.hier.graph.allow_revisits;
  auto& a = j["allocation"];
  a["max_iters"] = c.hier.allocation.max_iters;
  a["tol"] = c.hier.allocation.tol;
  a["armijo_c"] = c.hier.allocation.armijo_c;
  a["perturbed_starts"] = c.hier.allocation.perturbed_starts;
  a["alpha"] = c.hier.alpha ? nlohmann::json(*c.hier.alpha) : nlohmann::json(nullptr);
  j["refine"] = refine_json(c.hier.refine);
  const auto& cc = c.continuous;
  auto& m = j["cmaes"];
  m["n_ctrl"] = cc.n_ctrl;
  m["degree"] = cc.degree;
  m["clearance"] = cc.clearance;
  m["lambda"] = cc.cmaes.lambda;
  m["max_iters"] = cc.cmaes.max_iters;
  m["max_evals"] = cc.cmaes.max_evals;
  m["tol_x"] = cc.cmaes.tol_x;
  m["sigma0_scale"] = cc.sigma0_scale;
  m["budget_penalty"] = cc.budget_penalty;
  m["obstacle_penalty"] = cc.obstacle_penalty;
  m["workspace_penalty"] = cc.workspace_penalty;
  m["check_samples"] = cc.check_samples;
  m["m_quad"] = cc.m_quad;
  j["gradient"] = refine_json(cc.gradient);
  return j;
}

}  // namespace hipp
