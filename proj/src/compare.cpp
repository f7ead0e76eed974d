#include "hipp/compare.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace hipp {

namespace {

std::string fixed(double v, int digits) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

Stats summarize(std::vector<double> values) {
  Stats s;
  if (values.empty()) return s;
  const std::size_t n = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / n;
  std::sort(values.begin(), values.end());
  s.median = n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  if (n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / (n - 1));
  }
  return s;
}

Comparison compare(const std::vector<PlannerRuns>& columns) {
  Comparison c;
  std::vector<std::map<std::string, double>> by_instance(columns.size());
  for (std::size_t k = 0; k < columns.size(); ++k) {
    PlannerSummary row;
    row.name = columns[k].name;
    std::vector<double> obj;
    std::vector<double> rt;
    for (const auto& r : columns[k].runs) {
      obj.push_back(r.objective);
      rt.push_back(r.runtime);
      row.feasible += r.feasible ? 1 : 0;
      by_instance[k][r.instance] = r.objective;
    }
    row.runs = static_cast<int>(columns[k].runs.size());
    row.objective = summarize(obj);
    row.runtime = summarize(rt);
    c.rows.push_back(row);
  }
  c.win_rate.assign(columns.size(), std::vector<double>(columns.size(), 0.0));
  for (std::size_t a = 0; a < columns.size(); ++a) {
    for (std::size_t b = 0; b < columns.size(); ++b) {
      if (a == b) continue;
      int shared = 0;
      int wins = 0;
      for (const auto& [inst, obj] : by_instance[a]) {
        const auto it = by_instance[b].find(inst);
        if (it == by_instance[b].end()) continue;
        ++shared;
        if (obj < it->second) ++wins;
      }
      c.win_rate[a][b] = shared ? static_cast<double>(wins) / shared : 0.0;
    }
  }
  return c;
}

std::string comparison_csv(const Comparison& c) {
  std::ostringstream out;
  out << "planner,runs,feasible,objective_mean,objective_median,objective_std,runtime_mean,"
         "runtime_median,runtime_std\n";
  for (const auto& r : c.rows) {
    out << r.name << ',' << r.runs << ',' << r.feasible << ',' << fixed(r.objective.mean, 6) << ','
        << fixed(r.objective.median, 6) << ',' << fixed(r.objective.std, 6) << ','
        << fixed(r.runtime.mean, 6) << ',' << fixed(r.runtime.median, 6) << ','
        << fixed(r.runtime.std, 6) << '\n';
  }
  return out.str();
}

std::string comparison_markdown(const Comparison& c) {
  std::ostringstream out;
  out << "| planner | runs | feasible | objective mean | median | std | runtime mean (s) | median | std |\n";
  out << "|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : c.rows) {
    out << "| " << r.name << " | " << r.runs << " | " << r.feasible << " | "
        << fixed(r.objective.mean, 3) << " | " << fixed(r.objective.median, 3) << " | "
        << fixed(r.objective.std, 3) << " | " << fixed(r.runtime.mean, 3) << " | "
        << fixed(r.runtime.median, 3) << " | " << fixed(r.runtime.std, 3) << " |\n";
  }
  out << "\nWin rate (row beats column on objective):\n\n|  |";
  for (const auto& r : c.rows) out << ' ' << r.name << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < c.rows.size(); ++i) out << "---|";
  out << '\n';
  for (std::size_t a = 0; a < c.rows.size(); ++a) {
    out << "| " << c.rows[a].name << " |";
    for (std::size_t b = 0; b < c.rows.size(); ++b) {
      out << ' ' << (a == b ? std::string("-") : fixed(c.win_rate[a][b], 2)) << " |";
    }
    out << '\n';
  }
  return out.str();
}

std::vector<PlannerRuns> run_suite(const std::vector<std::pair<std::string, Scenario>>& scenarios,
                                   const std::vector<PlannerKind>& planners,
                                   const std::vector<std::uint64_t>& seeds,
                                   const PlannerConfig& config) {
  std::vector<PlannerRuns> cols;
  for (auto p : planners) cols.push_back({to_string(p), {}});
  for (const auto& [name, sc] : scenarios) {
    for (auto seed : seeds) {
      const std::string inst = name + "#" + std::to_string(seed);
      for (std::size_t k = 0; k < planners.size(); ++k) {
        const PlanOutput out = run_planner(sc, planners[k], config, seed);
        cols[k].runs.push_back({inst, out.report.objective, out.report.runtime, out.report.feasible});
      }
    }
  }
  return cols;
}

}  // namespace hipp
