#include "hipp/render.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace hipp {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s(buf);
  if (s == "-0.000") s = "0.000";
  return s;
}

class Canvas {
 public:
  Canvas(const Rect& ws, double width_px) : ws_(ws) {
    scale_ = width_px / std::max(ws.width(), ws.height());
  }

  double width() const { return ws_.width() * scale_ + 2 * kPad; }
  double height() const { return ws_.height() * scale_ + 2 * kPad; }
  double scale() const { return scale_; }
  double x(const Point& p) const { return kPad + (p.x() - ws_.xmin) * scale_; }
  double y(const Point& p) const { return kPad + (ws_.ymax - p.y()) * scale_; }

  std::string points(PointSpan pts) const {
    std::string s;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i) s += ' ';
      s += num(x(pts[i])) + "," + num(y(pts[i]));
    }
    return s;
  }

 private:
  static constexpr double kPad = 10.0;
  Rect ws_;
  double scale_ = 1.0;
};

}  // namespace

std::string render_svg(const Scenario& sc, const Trajectory* trajectory, PointSpan tests,
                       PointSpan measurements, std::span<const Ellipse> ellipses,
                       const SvgStyle& style) {
  const Rect& ws = sc.env.workspace;
  const Canvas c(ws, style.width_px);
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(c.width()) << "\" height=\""
      << num(c.height()) << "\" viewBox=\"0 0 " << num(c.width()) << " " << num(c.height())
      << "\">\n";
  out << "<rect x=\"" << num(c.x({ws.xmin, ws.ymax})) << "\" y=\"" << num(c.y({ws.xmin, ws.ymax}))
      << "\" width=\"" << num(ws.width() * c.scale()) << "\" height=\""
      << num(ws.height() * c.scale()) << "\" fill=\"white\" stroke=\"black\" stroke-width=\"1.5\"/>\n";

  out << "<g id=\"obstacles\" fill=\"#b0b0b0\" stroke=\"#606060\" stroke-width=\"1\">\n";
  for (const auto& o : sc.env.obstacles) {
    if (const auto* d = std::get_if<Disk>(&o)) {
      out << "<circle cx=\"" << num(c.x(d->center)) << "\" cy=\"" << num(c.y(d->center))
          << "\" r=\"" << num(d->radius * c.scale()) << "\"/>\n";
    } else {
      out << "<polygon points=\"" << c.points(std::get<ConvexPolygon>(o).vertices) << "\"/>\n";
    }
  }
  out << "</g>\n";

  out << "<g id=\"graph\" stroke=\"#8090c0\" stroke-width=\"0.8\" fill=\"#8090c0\">\n";
  const auto& vs = sc.graph.vertices();
  for (const auto& e : sc.graph.edges()) {
    out << "<line x1=\"" << num(c.x(vs[e.a])) << "\" y1=\"" << num(c.y(vs[e.a])) << "\" x2=\""
        << num(c.x(vs[e.b])) << "\" y2=\"" << num(c.y(vs[e.b])) << "\"/>\n";
  }
  for (const auto& v : vs) {
    out << "<circle cx=\"" << num(c.x(v)) << "\" cy=\"" << num(c.y(v)) << "\" r=\"2\"/>\n";
  }
  out << "</g>\n";

  if (!ellipses.empty()) {
    out << "<g id=\"ellipses\" fill=\"none\" stroke=\"#9050b0\" stroke-width=\"0.8\" "
           "stroke-dasharray=\"4 3\">\n";
    for (const auto& e : ellipses) {
      const Point mid = 0.5 * (e.focus_u() + e.focus_v());
      const Point d = e.focus_v() - e.focus_u();
      const double a = 0.5 * e.major_len();
      const double f = 0.5 * d.norm();
      const double b = std::sqrt(std::max(0.0, a * a - f * f));
      // Screen y points down, so the rotation flips sign.
      const double deg = -std::atan2(d.y(), d.x()) * 180.0 / std::numbers::pi;
      out << "<ellipse cx=\"" << num(c.x(mid)) << "\" cy=\"" << num(c.y(mid)) << "\" rx=\""
          << num(a * c.scale()) << "\" ry=\"" << num(b * c.scale()) << "\" transform=\"rotate("
          << num(deg) << " " << num(c.x(mid)) << " " << num(c.y(mid)) << ")\"/>\n";
    }
    out << "</g>\n";
  }

  if (trajectory && !trajectory->segments.empty()) {
    out << "<g id=\"trajectory\" fill=\"none\" stroke=\"#1060d0\" stroke-width=\"2.5\">\n";
    for (const auto& seg : trajectory->segments) {
      const int n = seg.degree() == 1 ? 2 : std::max(2, style.samples_per_segment);
      out << "<polyline points=\"" << c.points(seg.sample(n)) << "\"/>\n";
    }
    out << "</g>\n";
  }

  if (!measurements.empty()) {
    out << "<g id=\"measurements\" fill=\"#d03030\">\n";
    for (const auto& p : measurements) {
      out << "<circle cx=\"" << num(c.x(p)) << "\" cy=\"" << num(c.y(p)) << "\" r=\"3\"/>\n";
    }
    out << "</g>\n";
  }

  if (!tests.empty()) {
    out << "<g id=\"tests\" stroke=\"#2040a0\" stroke-width=\"1.5\">\n";
    for (const auto& p : tests) {
      const double px = c.x(p);
      const double py = c.y(p);
      out << "<path d=\"M" << num(px - 4) << " " << num(py - 4) << "L" << num(px + 4) << " "
          << num(py + 4) << "M" << num(px - 4) << " " << num(py + 4) << "L" << num(px + 4) << " "
          << num(py - 4) << "\"/>\n";
    }
    out << "</g>\n";
  }

  out << "<circle id=\"start\" cx=\"" << num(c.x(sc.start_point())) << "\" cy=\""
      << num(c.y(sc.start_point())) << "\" r=\"6\" fill=\"#30a040\"/>\n";
  out << "<circle id=\"goal\" cx=\"" << num(c.x(sc.goal_point())) << "\" cy=\""
      << num(c.y(sc.goal_point())) << "\" r=\"6\" fill=\"#f09020\"/>\n";
  out << "</svg>\n";
  return out.str();
}

}  // namespace hipp
