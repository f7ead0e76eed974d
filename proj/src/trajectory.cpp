#include "hipp/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "hipp/error.hpp"

namespace hipp {

PointList Trajectory::measurements() const {
  PointList out;
  out.reserve(num_measurements());
  for (const auto& pts : measurement_points) out.insert(out.end(), pts.begin(), pts.end());
  return out;
}

std::size_t Trajectory::num_measurements() const {
  std::size_t n = 0;
  for (const auto& pts : measurement_points) n += pts.size();
  return n;
}

double trajectory_length(const Trajectory& traj, int intervals) {
  double total = 0.0;
  for (const auto& seg : traj.segments) total += segment_arc_length(seg, intervals);
  return total;
}

std::vector<int> distribute_measurements(std::span<const double> lengths, int n_total) {
  const std::size_t k = lengths.size();
  if (k == 0) {
    if (n_total != 0) throw Error(ErrorKind::Contract, "distribute_measurements: no segments");
    return {};
  }
  if (n_total < 2 * static_cast<int>(k)) {
    std::ostringstream msg;
    msg << "distribute_measurements: " << n_total << " measurements cannot give " << k
        << " segments at least 2 each";
    throw Error(ErrorKind::Contract, msg.str());
  }
  for (double l : lengths) {
    if (!(l >= 0.0) || !std::isfinite(l)) {
      throw Error(ErrorKind::Contract, "distribute_measurements: lengths must be finite and >= 0");
    }
  }

  std::vector<bool> pinned(k, false);
  std::vector<double> quota(k, 2.0);
  for (;;) {
    int free_count = 0;
    double free_len = 0.0;
    int remaining = n_total;
    for (std::size_t e = 0; e < k; ++e) {
      if (pinned[e]) {
        remaining -= 2;
      } else {
        ++free_count;
        free_len += lengths[e];
      }
    }
    if (free_count == 0) break;
    bool changed = false;
    for (std::size_t e = 0; e < k; ++e) {
      if (pinned[e]) continue;
      quota[e] = free_len > 0.0 ? remaining * lengths[e] / free_len
                                : static_cast<double>(remaining) / free_count;
      if (quota[e] < 2.0) {
        pinned[e] = true;
        quota[e] = 2.0;
        changed = true;
      }
    }
    if (!changed) break;
  }

  std::vector<int> counts(k);
  int assigned = 0;
  for (std::size_t e = 0; e < k; ++e) {
    counts[e] = static_cast<int>(std::floor(quota[e]));
    assigned += counts[e];
  }
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return quota[a] - counts[a] > quota[b] - counts[b];
  });
  for (std::size_t i = 0; assigned < n_total; i = (i + 1) % k) {
    ++counts[order[i]];
    ++assigned;
  }
  return counts;
}

RefinedTrajectory assemble_trajectory(std::vector<SplineSegment> segments,
                                      std::span<const double> allocation, PointSpan tests,
                                      const KernelParams& params, int n_total, double budget,
                                      int m_quad) {
  if (segments.size() != allocation.size()) {
    throw Error(ErrorKind::Assembly, "assemble_trajectory: one allocation per segment required");
  }
  for (std::size_t e = 1; e < segments.size(); ++e) {
    if (segments[e - 1].end() != segments[e].start()) {
      std::ostringstream msg;
      msg << "assemble_trajectory: segment " << e - 1 << " ends at (" << segments[e - 1].end().x()
          << ", " << segments[e - 1].end().y() << ") but segment " << e << " starts at ("
          << segments[e].start().x() << ", " << segments[e].start().y() << ")";
      throw Error(ErrorKind::Assembly, msg.str());
    }
  }

  RefinedTrajectory out;
  out.counts = distribute_measurements(allocation, n_total);
  const double alloc_sum = std::accumulate(allocation.begin(), allocation.end(), 0.0);
  if (alloc_sum > budget + 1e-6) {
    std::ostringstream msg;
    msg << "assemble_trajectory: allocations sum to " << alloc_sum << " above budget " << budget;
    throw Error(ErrorKind::Assembly, msg.str());
  }

  out.trajectory.segments = std::move(segments);
  for (std::size_t e = 0; e < out.trajectory.segments.size(); ++e) {
    const auto& seg = out.trajectory.segments[e];
    out.trajectory.measurement_t.push_back(uniform_parameters(out.counts[e]));
    out.trajectory.measurement_points.push_back(seg.sample(out.counts[e]));
    out.segment_objectives.push_back(
        posterior_cov_trace(tests, out.trajectory.measurement_points.back(), params));
    out.segment_lengths.push_back(segment_arc_length(seg, m_quad));
    out.total_length += out.segment_lengths.back();
  }
  if (out.total_length > alloc_sum + 1e-9 * std::max(1.0, alloc_sum)) {
    std::ostringstream msg;
    msg << "assemble_trajectory: length " << out.total_length << " exceeds allocated " << alloc_sum;
    throw Error(ErrorKind::Assembly, msg.str());
  }
  out.objective = posterior_cov_trace(tests, out.trajectory.measurements(), params);
  return out;
}

TrajectoryCheck validate_trajectory(const Trajectory& traj, const Environment& env,
                                    const Point& start, const Point& goal, double budget,
                                    double clearance, int intervals) {
  TrajectoryCheck c;
  std::ostringstream why;
  c.chained = !traj.segments.empty() && traj.segments.front().start() == start &&
              traj.segments.back().end() == goal;
  for (std::size_t e = 1; c.chained && e < traj.segments.size(); ++e) {
    c.chained = traj.segments[e - 1].end() == traj.segments[e].start();
  }
  if (traj.segments.empty() && start == goal) c.chained = true;
  if (!c.chained) why << "trajectory does not chain from start to goal; ";

  c.min_obstacle_clearance = std::numeric_limits<double>::infinity();
  c.min_workspace_clearance = std::numeric_limits<double>::infinity();
  auto probe = [&](const Point& p) {
    c.min_workspace_clearance = std::min(c.min_workspace_clearance, workspace_signed_distance(p, env.workspace));
    for (std::size_t o = 0; o < env.obstacles.size(); ++o) {
      const double d = signed_distance(p, env.obstacles[o]);
      if (d < c.min_obstacle_clearance) {
        c.min_obstacle_clearance = d;
        c.worst_obstacle = static_cast<std::ptrdiff_t>(o);
      }
    }
  };
  for (const auto& seg : traj.segments) {
    for (int i = 0; i <= intervals; ++i) probe(seg.eval(static_cast<double>(i) / intervals));
  }
  for (const auto& pts : traj.measurement_points) {
    for (const auto& p : pts) probe(p);
  }

  c.length = trajectory_length(traj, intervals);
  c.length_ok = c.length <= budget + 1e-9 * std::max(1.0, budget);
  if (!c.length_ok) why << "length " << c.length << " exceeds budget " << budget << "; ";
  const bool clear = c.min_obstacle_clearance >= clearance - 1e-9;
  if (!clear) {
    why << "obstacle " << c.worst_obstacle << " violated by " << clearance - c.min_obstacle_clearance
        << "; ";
  }
  const bool inside = c.min_workspace_clearance >= -1e-9;
  if (!inside) why << "leaves the workspace by " << -c.min_workspace_clearance << "; ";
  c.feasible = c.chained && c.length_ok && clear && inside;
  c.reason = why.str();
  if (!c.reason.empty()) c.reason.resize(c.reason.size() - 2);
  return c;
}

}  // namespace hipp
