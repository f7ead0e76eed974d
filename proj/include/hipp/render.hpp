#pragma once

// Static SVG pictures of a scenario and a plan. Output is byte-stable for
// fixed inputs: fixed element order and fixed-precision coordinates.

#include <span>
#include <string>

#include "hipp/geometry.hpp"
#include "hipp/scenario.hpp"
#include "hipp/trajectory.hpp"

namespace hipp {

struct SvgStyle {
  double width_px = 640.0;      // the longer workspace side maps to this
  int samples_per_segment = 64; // polyline resolution of each spline
};

/// Workspace frame, obstacles, graph, then the optional layers: allocation
/// ellipses, trajectory, measurement dots and test crosses. Start is drawn
/// green and goal orange. A null or empty trajectory gives the scene alone.
std::string render_svg(const Scenario& scenario, const Trajectory* trajectory, PointSpan tests,
                       PointSpan measurements, std::span<const Ellipse> ellipses = {},
                       const SvgStyle& style = {});

}  // namespace hipp
