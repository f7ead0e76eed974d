#include "hipp/bspline.hpp"

#include <algorithm>
#include <cmath>

#include "hipp/error.hpp"

namespace hipp {

std::vector<double> clamped_uniform_knots(int n_ctrl, int degree) {
  if (degree < 1 || n_ctrl < degree + 1) {
    throw Error(ErrorKind::Validation, "B-spline needs degree >= 1 and at least degree + 1 control points");
  }
  std::vector<double> knots;
  knots.reserve(n_ctrl + degree + 1);
  knots.insert(knots.end(), degree + 1, 0.0);
  const int interior = n_ctrl - degree - 1;
  for (int i = 1; i <= interior; ++i) knots.push_back(static_cast<double>(i) / (interior + 1));
  knots.insert(knots.end(), degree + 1, 1.0);
  return knots;
}

Eigen::VectorXd bspline_basis(double t, int degree, const std::vector<double>& knots) {
  const int n_ctrl = static_cast<int>(knots.size()) - degree - 1;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n_ctrl);
  t = std::clamp(t, knots.front(), knots.back());

  // Knot span index with knots[span] <= t < knots[span + 1]; the last
  // non-empty span at the right end.
  int span = n_ctrl - 1;
  if (t < knots[n_ctrl]) {
    span = static_cast<int>(std::upper_bound(knots.begin(), knots.end(), t) - knots.begin()) - 1;
  }

  std::vector<double> n(degree + 1, 0.0), left(degree + 1), right(degree + 1);
  n[0] = 1.0;
  for (int j = 1; j <= degree; ++j) {
    left[j] = t - knots[span + 1 - j];
    right[j] = knots[span + j] - t;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double denom = right[r + 1] + left[j - r];
      const double temp = denom == 0.0 ? 0.0 : n[r] / denom;
      n[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    n[j] = saved;
  }
  for (int j = 0; j <= degree; ++j) out(span - degree + j) = n[j];
  return out;
}

std::vector<double> greville_abscissae(int n_ctrl, int degree) {
  const auto knots = clamped_uniform_knots(n_ctrl, degree);
  std::vector<double> g(n_ctrl);
  for (int i = 0; i < n_ctrl; ++i) {
    double s = 0.0;
    for (int k = 1; k <= degree; ++k) s += knots[i + k];
    g[i] = s / degree;
  }
  return g;
}

std::vector<double> uniform_parameters(int n) {
  std::vector<double> ts(n);
  if (n == 1) {
    ts[0] = 0.0;
    return ts;
  }
  for (int i = 0; i < n; ++i) ts[i] = static_cast<double>(i) / (n - 1);
  return ts;
}

Eigen::MatrixXd basis_matrix(const std::vector<double>& ts, int degree,
                             const std::vector<double>& knots) {
  const int n_ctrl = static_cast<int>(knots.size()) - degree - 1;
  Eigen::MatrixXd m(static_cast<Eigen::Index>(ts.size()), n_ctrl);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    m.row(static_cast<Eigen::Index>(i)) = bspline_basis(ts[i], degree, knots).transpose();
  }
  return m;
}

SplineSegment::SplineSegment(PointList control, int degree)
    : degree_(degree),
      control_(std::move(control)),
      knots_(clamped_uniform_knots(static_cast<int>(control_.size()), degree)) {}

SplineSegment SplineSegment::straight(const Point& u, const Point& v, int n_ctrl, int degree) {
  const auto g = greville_abscissae(n_ctrl, degree);
  PointList ctrl(n_ctrl);
  for (int i = 0; i < n_ctrl; ++i) ctrl[i] = u + g[i] * (v - u);
  ctrl.front() = u;
  ctrl.back() = v;
  return SplineSegment(std::move(ctrl), degree);
}

Point SplineSegment::eval(double t) const {
  const Eigen::VectorXd w = bspline_basis(t, degree_, knots_);
  Point p = Point::Zero();
  for (std::size_t i = 0; i < control_.size(); ++i) p += w(static_cast<Eigen::Index>(i)) * control_[i];
  return p;
}

PointList SplineSegment::sample(int n) const {
  return sample(basis_matrix(uniform_parameters(n), degree_, knots_));
}

PointList SplineSegment::sample(const Eigen::MatrixXd& basis) const {
  PointList out(static_cast<std::size_t>(basis.rows()));
  for (Eigen::Index r = 0; r < basis.rows(); ++r) {
    Point p = Point::Zero();
    for (Eigen::Index c = 0; c < basis.cols(); ++c) p += basis(r, c) * control_[c];
    out[r] = p;
  }
  // Clamped endpoints interpolate exactly.
  if (!out.empty() && basis(0, 0) == 1.0) out.front() = control_.front();
  if (!out.empty() && basis(basis.rows() - 1, basis.cols() - 1) == 1.0) out.back() = control_.back();
  return out;
}

void SplineSegment::set_interior(const Eigen::VectorXd& coords) {
  for (std::size_t i = 1; i + 1 < control_.size(); ++i) {
    control_[i] = Point(coords(2 * (i - 1)), coords(2 * (i - 1) + 1));
  }
}

Eigen::VectorXd SplineSegment::interior() const {
  Eigen::VectorXd x(2 * (static_cast<Eigen::Index>(control_.size()) - 2));
  for (std::size_t i = 1; i + 1 < control_.size(); ++i) {
    x(2 * (i - 1)) = control_[i].x();
    x(2 * (i - 1) + 1) = control_[i].y();
  }
  return x;
}

double segment_arc_length(const SplineSegment& seg, int m_quad) {
  std::vector<double> ts(m_quad + 1);
  for (int i = 0; i <= m_quad; ++i) ts[i] = static_cast<double>(i) / m_quad;
  const PointList pts = seg.sample(basis_matrix(ts, seg.degree(), seg.knots()));
  double total = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) total += (pts[i] - pts[i - 1]).norm();
  return total;
}

bool is_straight(const SplineSegment& seg) {
  const Point& u = seg.start();
  const Point& v = seg.end();
  const Point d = v - u;
  const double len = d.norm();
  const double tol = 1e-12 * std::max(1.0, len);
  double prev = 0.0;
  for (const auto& p : seg.control()) {
    const Point r = p - u;
    if (len == 0.0) {
      if (r.norm() > tol) return false;
      continue;
    }
    if (std::abs(d.x() * r.y() - d.y() * r.x()) / len > tol) return false;
    const double s = r.dot(d) / len;
    if (s < prev - tol || s > len + tol) return false;
    prev = s;
  }
  return true;
}

}  // namespace hipp
