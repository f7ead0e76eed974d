#include "hipp/scenario.hpp"

#include <cmath>
#include <sstream>

#include "hipp/error.hpp"

namespace hipp {

void Scenario::validate() const {
  std::ostringstream err;
  auto collect = [&](auto&& check) {
    try {
      check();
    } catch (const Error& e) {
      err << trim_separators(e.what()) << "; ";
    }
  };
  collect([&] { env.validate(); });
  collect([&] { kernel.validate(); });
  if (err.str().empty()) collect([&] { graph.validate_against(env); });

  if (start >= graph.size()) err << "start vertex " << start << " is not in the graph; ";
  if (goal >= graph.size()) err << "goal vertex " << goal << " is not in the graph; ";
  if (start == goal) err << "start and goal must differ; ";
  if (!(budget > 0.0) || !std::isfinite(budget)) err << "budget must be positive and finite; ";
  if (n_measurements < 1) err << "n_measurements must be >= 1; ";
  if (test_points.empty()) err << "test set is empty; ";
  for (std::size_t j = 0; j < test_points.size(); ++j) {
    if (!env.workspace.contains(test_points[j])) err << "test point " << j << " lies outside the workspace; ";
  }
  if (sampling && sampling->m < 1) err << "test_sampling.m must be >= 1; ";
  if (importance_grid) collect([&] { importance_grid->validate(); });
  if (truth_grid) collect([&] { truth_grid->validate(); });
  if (!err.str().empty()) throw Error(ErrorKind::Validation, "scenario: " + trim_separators(err.str()));

  const double shortest = goal_distances(graph, goal)[start];
  if (!(shortest <= budget + budget_tolerance(budget))) {
    std::ostringstream msg;
    if (std::isinf(shortest)) {
      msg << "scenario: goal is unreachable from start";
    } else {
      msg << "scenario: budget " << budget << " is below the shortest path " << shortest
          << " (deficit " << shortest - budget << ")";
    }
    throw InfeasibleError(msg.str(), shortest, shortest - budget);
  }
}

std::vector<std::string> Scenario::warnings() const {
  std::vector<std::string> out;
  for (std::size_t j = 0; j < test_points.size(); ++j) {
    for (std::size_t k = 0; k < j; ++k) {
      if (test_points[j] == test_points[k]) {
        std::ostringstream msg;
        msg << "test point " << j << " duplicates test point " << k;
        out.push_back(msg.str());
        break;
      }
    }
  }
  return out;
}

}  // namespace hipp
