#include "hipp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "hipp/error.hpp"

namespace hipp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double cross2(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

int orientation(const Point& a, const Point& b, const Point& c) {
  const double v = cross2(b - a, c - a);
  if (v > 0.0) return 1;
  if (v < 0.0) return -1;
  return 0;
}

bool on_segment(const Point& a, const Point& b, const Point& p) {
  return p.x() >= std::min(a.x(), b.x()) && p.x() <= std::max(a.x(), b.x()) &&
         p.y() >= std::min(a.y(), b.y()) && p.y() <= std::max(a.y(), b.y());
}

bool segments_intersect(const Point& p1, const Point& p2, const Point& q1, const Point& q2) {
  const int o1 = orientation(p1, p2, q1);
  const int o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1);
  const int o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

Point closest_on_segment(const Point& x, const Point& a, const Point& b) {
  const Point d = b - a;
  const double len2 = d.squaredNorm();
  if (len2 == 0.0) return a;
  const double t = std::clamp((x - a).dot(d) / len2, 0.0, 1.0);
  return a + t * d;
}

// Max over edges of the outward half-plane distance; <= 0 iff inside.
double polygon_halfplane_max(const Point& x, const PointList& v) {
  double best = -kInf;
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = v[i];
    const Point& b = v[(i + 1) % n];
    const Point d = b - a;
    const Point normal(d.y(), -d.x());
    best = std::max(best, normal.dot(x - a) / normal.norm());
  }
  return best;
}

double polygon_boundary_distance(const Point& x, const PointList& v) {
  double best = kInf;
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    best = std::min(best, point_segment_distance(x, v[i], v[(i + 1) % n]));
  }
  return best;
}

double diameter(const Obstacle& obs) {
  if (const auto* disk = std::get_if<Disk>(&obs)) return 2.0 * disk->radius;
  return bounds(obs).diagonal();
}

// Minimiser of g . q over the obstacle.
Point support_min(const Obstacle& obs, const Point& g) {
  if (const auto* disk = std::get_if<Disk>(&obs)) {
    const double n = g.norm();
    if (n == 0.0) return disk->center;
    return disk->center - disk->radius * g / n;
  }
  const auto& v = std::get<ConvexPolygon>(obs).vertices;
  Point best = v.front();
  double val = g.dot(best);
  for (const auto& p : v) {
    const double s = g.dot(p);
    if (s < val) {
      val = s;
      best = p;
    }
  }
  return best;
}

// Eberly's bisection for the closest point on an axis-aligned ellipse with
// semi-axes e0 >= e1 > 0, for a query (y0, y1) in the first quadrant outside it.
double distance_outside_ellipse(double e0, double e1, double y0, double y1) {
  if (y1 > 0.0) {
    if (y0 > 0.0) {
      const double z0 = y0 / e0;
      const double z1 = y1 / e1;
      double g = z0 * z0 + z1 * z1 - 1.0;
      if (g <= 0.0) return 0.0;
      const double r0 = (e0 / e1) * (e0 / e1);
      const double n0 = r0 * z0;
      double s0 = z1 - 1.0;
      double s1 = std::hypot(n0, z1) - 1.0;
      double s = 0.0;
      for (int i = 0; i < 1100; ++i) {
        s = 0.5 * (s0 + s1);
        if (s == s0 || s == s1) break;
        const double ratio0 = n0 / (s + r0);
        const double ratio1 = z1 / (s + 1.0);
        g = ratio0 * ratio0 + ratio1 * ratio1 - 1.0;
        if (g > 0.0) {
          s0 = s;
        } else if (g < 0.0) {
          s1 = s;
        } else {
          break;
        }
      }
      const double x0 = r0 * y0 / (s + r0);
      const double x1 = y1 / (s + 1.0);
      return std::hypot(x0 - y0, x1 - y1);
    }
    return std::max(0.0, y1 - e1);
  }
  return std::max(0.0, y0 - e0);
}

}  // namespace

void validate_obstacle(const Obstacle& obs) {
  if (const auto* disk = std::get_if<Disk>(&obs)) {
    if (!(disk->radius > 0.0) || !std::isfinite(disk->radius) || !disk->center.allFinite()) {
      throw Error(ErrorKind::Validation, "disk obstacle needs a finite center and radius > 0");
    }
    return;
  }
  const auto& v = std::get<ConvexPolygon>(obs).vertices;
  if (v.size() < 3) throw Error(ErrorKind::Validation, "polygon obstacle needs >= 3 vertices");
  const std::size_t n = v.size();
  double turning = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!v[i].allFinite()) throw Error(ErrorKind::Validation, "polygon vertex is not finite");
    const Point e0 = v[(i + 1) % n] - v[i];
    const Point e1 = v[(i + 2) % n] - v[(i + 1) % n];
    if (e0.norm() <= 1e-12) throw Error(ErrorKind::Validation, "polygon has repeated vertices");
    if (cross2(e0, e1) <= 1e-9) {
      throw Error(ErrorKind::Validation,
                  "polygon must be strictly convex with counter-clockwise vertices");
    }
    turning += std::atan2(cross2(e0, e1), e0.dot(e1));
  }
  if (std::abs(turning - 2.0 * std::numbers::pi) > 1e-6) {
    throw Error(ErrorKind::Validation, "polygon winds more than once");
  }
}

Rect bounds(const Obstacle& obs) {
  if (const auto* disk = std::get_if<Disk>(&obs)) {
    return {disk->center.x() - disk->radius, disk->center.y() - disk->radius,
            disk->center.x() + disk->radius, disk->center.y() + disk->radius};
  }
  const auto& v = std::get<ConvexPolygon>(obs).vertices;
  Rect r{kInf, kInf, -kInf, -kInf};
  for (const auto& p : v) {
    r.xmin = std::min(r.xmin, p.x());
    r.ymin = std::min(r.ymin, p.y());
    r.xmax = std::max(r.xmax, p.x());
    r.ymax = std::max(r.ymax, p.y());
  }
  return r;
}

namespace {

bool intersects_rect(const Obstacle& obs, const Rect& ws) {
  if (const auto* disk = std::get_if<Disk>(&obs)) {
    const Point c = disk->center;
    const Point q(std::clamp(c.x(), ws.xmin, ws.xmax), std::clamp(c.y(), ws.ymin, ws.ymax));
    return (q - c).norm() <= disk->radius;
  }
  const auto& v = std::get<ConvexPolygon>(obs).vertices;
  for (const auto& p : v) {
    if (ws.contains(p)) return true;
  }
  const Point corners[4] = {{ws.xmin, ws.ymin}, {ws.xmax, ws.ymin}, {ws.xmax, ws.ymax},
                            {ws.xmin, ws.ymax}};
  for (const auto& c : corners) {
    if (signed_distance(c, obs) <= 0.0) return true;
  }
  for (int i = 0; i < 4; ++i) {
    if (segment_intersects(obs, corners[i], corners[(i + 1) % 4])) return true;
  }
  return false;
}

}  // namespace

void Environment::validate() const {
  std::ostringstream err;
  if (!(workspace.area() > 0.0)) err << "workspace has non-positive area; ";
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    try {
      validate_obstacle(obstacles[i]);
    } catch (const Error& e) {
      err << "obstacle " << i << ": " << e.what() << "; ";
      continue;
    }
    if (!intersects_rect(obstacles[i], workspace)) {
      err << "obstacle " << i << " does not intersect the workspace; ";
    }
  }
  if (err.str().empty()) {
    constexpr int kGrid = 64;
    bool any_free = false;
    for (int iy = 0; iy < kGrid && !any_free; ++iy) {
      for (int ix = 0; ix < kGrid && !any_free; ++ix) {
        const Point p(workspace.xmin + (ix + 0.5) * workspace.width() / kGrid,
                      workspace.ymin + (iy + 0.5) * workspace.height() / kGrid);
        any_free = is_free(p);
      }
    }
    if (!any_free) err << "free space is empty; ";
  }
  if (!err.str().empty()) throw Error(ErrorKind::Validation, "environment: " + trim_separators(err.str()));
}

bool Environment::is_free(const Point& p, double clearance) const {
  if (workspace_signed_distance(p, workspace) < clearance) return false;
  for (const auto& o : obstacles) {
    if (signed_distance(p, o) < clearance) return false;
  }
  return true;
}

double arc_length(PointSpan polyline) {
  double total = 0.0;
  for (std::size_t i = 1; i < polyline.size(); ++i) total += (polyline[i] - polyline[i - 1]).norm();
  return total;
}

Ellipse::Ellipse(const Point& u, const Point& v, double major_len)
    : u_(u), v_(v), major_(major_len) {
  const double d = (u - v).norm();
  if (!(major_len >= d - 1e-12 * std::max(1.0, d))) {
    std::ostringstream msg;
    msg << "ellipse major length " << major_len << " is below the focal distance " << d;
    throw Error(ErrorKind::Domain, msg.str());
  }
  major_ = std::max(major_len, d);
}

bool ellipse_contains(const Ellipse& e, const Point& x) {
  return e.focal_sum(x) <= e.major_len() + 1e-12;
}

double distance_to_ellipse(const Ellipse& e, const Point& x) {
  if (ellipse_contains(e, x)) return 0.0;
  const Point& u = e.focus_u();
  const Point& v = e.focus_v();
  const double focal = (v - u).norm();
  const double a = 0.5 * e.major_len();
  const Point center = 0.5 * (u + v);
  if (focal == 0.0) return std::max(0.0, (x - center).norm() - a);
  const double half = 0.5 * focal;
  const double b = std::sqrt(std::max(a * a - half * half, 0.0));
  if (b <= 1e-14 * a) return point_segment_distance(x, u, v);
  const Point axis = (v - u) / focal;
  const Point normal(-axis.y(), axis.x());
  const double y0 = std::abs(axis.dot(x - center));
  const double y1 = std::abs(normal.dot(x - center));
  return distance_outside_ellipse(a, b, y0, y1);
}

bool influence_region_contains(const Ellipse& e, double r_kernel, const Point& x) {
  const double s = e.focal_sum(x);
  if (s <= e.major_len() + 1e-12) return true;
  if (s > e.major_len() + 2.0 * r_kernel + 1e-12) return false;
  return distance_to_ellipse(e, x) <= r_kernel;
}

double point_segment_distance(const Point& x, const Point& a, const Point& b) {
  return (x - closest_on_segment(x, a, b)).norm();
}

double signed_distance(const Point& x, const Obstacle& obs) {
  if (const auto* disk = std::get_if<Disk>(&obs)) return (x - disk->center).norm() - disk->radius;
  const auto& v = std::get<ConvexPolygon>(obs).vertices;
  const double inside = polygon_halfplane_max(x, v);
  if (inside <= 0.0) return inside;
  return polygon_boundary_distance(x, v);
}

double signed_distance(const Point& x, const std::vector<Obstacle>& obstacles) {
  double best = kInf;
  for (const auto& o : obstacles) best = std::min(best, signed_distance(x, o));
  return best;
}

PreparedObstacle::PreparedObstacle(const Obstacle& obs) {
  if (const auto* disk = std::get_if<Disk>(&obs)) {
    disk_ = true;
    center_ = disk->center;
    radius_ = disk->radius;
    return;
  }
  vertices_ = std::get<ConvexPolygon>(obs).vertices;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point d = vertices_[(i + 1) % n] - vertices_[i];
    const Point normal = Point(d.y(), -d.x()) / d.norm();
    normals_.push_back(normal);
    offsets_.push_back(normal.dot(vertices_[i]));
  }
}

double PreparedObstacle::signed_distance(const Point& x) const {
  if (disk_) return (x - center_).norm() - radius_;
  const std::size_t n = vertices_.size();
  double inside = -kInf;
  for (std::size_t i = 0; i < n; ++i) inside = std::max(inside, normals_[i].dot(x) - offsets_[i]);
  if (inside <= 0.0) return inside;
  // The nearest boundary point lies on an edge that faces x.
  double best = kInf;
  for (std::size_t i = 0; i < n; ++i) {
    if (normals_[i].dot(x) - offsets_[i] < 0.0) continue;
    best = std::min(best, point_segment_distance(x, vertices_[i], vertices_[(i + 1) % n]));
  }
  return best;
}

double workspace_signed_distance(const Point& x, const Rect& ws) {
  const double dx = std::max({ws.xmin - x.x(), 0.0, x.x() - ws.xmax});
  const double dy = std::max({ws.ymin - x.y(), 0.0, x.y() - ws.ymax});
  if (dx > 0.0 || dy > 0.0) return -std::hypot(dx, dy);
  return std::min({x.x() - ws.xmin, ws.xmax - x.x(), x.y() - ws.ymin, ws.ymax - x.y()});
}

Point project_onto(const Obstacle& obs, const Point& x) {
  if (const auto* disk = std::get_if<Disk>(&obs)) {
    const Point d = x - disk->center;
    const double n = d.norm();
    if (n <= disk->radius) return x;
    return disk->center + disk->radius * d / n;
  }
  const auto& v = std::get<ConvexPolygon>(obs).vertices;
  if (polygon_halfplane_max(x, v) <= 0.0) return x;
  Point best = v.front();
  double best_d = kInf;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point q = closest_on_segment(x, v[i], v[(i + 1) % v.size()]);
    const double d = (q - x).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = q;
    }
  }
  return best;
}

bool segment_intersects(const Obstacle& obs, const Point& a, const Point& b) {
  if (const auto* disk = std::get_if<Disk>(&obs)) {
    return point_segment_distance(disk->center, a, b) <= disk->radius;
  }
  const auto& v = std::get<ConvexPolygon>(obs).vertices;
  if (polygon_halfplane_max(a, v) <= 0.0 || polygon_halfplane_max(b, v) <= 0.0) return true;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (segments_intersect(a, b, v[i], v[(i + 1) % v.size()])) return true;
  }
  return false;
}

FocalSumBound focal_sum_bounds(const Obstacle& obs, const Point& u, const Point& v, double tol,
                               int max_iters) {
  const double chord = (u - v).norm();
  FocalSumBound out;
  if (segment_intersects(obs, u, v)) {
    out.upper = out.lower = chord;
    out.converged = true;
    return out;
  }
  auto focal = [&](const Point& p) { return (p - u).norm() + (p - v).norm(); };
  const double scale = diameter(obs);
  Point p = project_onto(obs, 0.5 * (u + v));
  out.upper = kInf;
  out.lower = chord;
  for (int k = 1; k <= max_iters; ++k) {
    out.iterations = k;
    const double f = focal(p);
    out.upper = std::min(out.upper, f);
    // u, v lie outside the obstacle, so the objective is differentiable here.
    const Point g = (p - u).normalized() + (p - v).normalized();
    const Point q = support_min(obs, g);
    out.lower = std::max(out.lower, f + g.dot(q - p));
    if (out.upper - out.lower <= tol) {
      out.converged = true;
      break;
    }
    p = project_onto(obs, p - (scale / std::sqrt(static_cast<double>(k))) * g);
  }
  return out;
}

double min_focal_sum(const Obstacle& obs, const Point& u, const Point& v, double tol) {
  const FocalSumBound b = focal_sum_bounds(obs, u, v, tol);
  return b.converged ? b.upper : (u - v).norm();
}

std::vector<std::size_t> kept_obstacle_indices(const Environment& env, const Point& u,
                                               const Point& v, double budget,
                                               double safety_margin) {
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < env.obstacles.size(); ++i) {
    if (min_focal_sum(env.obstacles[i], u, v) <= budget + safety_margin) kept.push_back(i);
  }
  return kept;
}

std::vector<Obstacle> prune_obstacles(const Environment& env, const Point& u, const Point& v,
                                      double budget, double safety_margin) {
  std::vector<Obstacle> kept;
  for (std::size_t i : kept_obstacle_indices(env, u, v, budget, safety_margin)) {
    kept.push_back(env.obstacles[i]);
  }
  return kept;
}

std::string describe(const Obstacle& obs) {
  std::ostringstream s;
  if (const auto* disk = std::get_if<Disk>(&obs)) {
    s << "disk(center=(" << disk->center.x() << ", " << disk->center.y()
      << "), radius=" << disk->radius << ")";
  } else {
    s << "polygon(" << std::get<ConvexPolygon>(obs).vertices.size() << " vertices)";
  }
  return s.str();
}

}  // namespace hipp
