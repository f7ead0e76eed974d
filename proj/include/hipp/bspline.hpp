#pragma once

#include <vector>

#include <Eigen/Dense>

#include "hipp/types.hpp"

namespace hipp {

/// Clamped knot vector with uniform interior knots on [0, 1]:
/// degree + 1 zeros, n_ctrl - degree - 1 interior knots, degree + 1 ones.
std::vector<double> clamped_uniform_knots(int n_ctrl, int degree);

/// Cox-de Boor basis weights for all n_ctrl control points at t in [0, 1].
Eigen::VectorXd bspline_basis(double t, int degree, const std::vector<double>& knots);

/// Parameter values whose control points reproduce a straight line exactly.
std::vector<double> greville_abscissae(int n_ctrl, int degree);

/// Uniform parameters i / (n - 1), i = 0..n-1.
std::vector<double> uniform_parameters(int n);

/// Row i holds the basis weights at ts[i].
Eigen::MatrixXd basis_matrix(const std::vector<double>& ts, int degree,
                             const std::vector<double>& knots);

/// Clamped uniform B-spline on [0, 1]; first and last control points are the endpoints.
class SplineSegment {
 public:
  SplineSegment() = default;
  /// Throws Error(Validation) if fewer than degree + 1 control points are given.
  SplineSegment(PointList control, int degree);

  /// Straight segment u -> v with control points at the Greville abscissae.
  static SplineSegment straight(const Point& u, const Point& v, int n_ctrl, int degree);

  int degree() const { return degree_; }
  const PointList& control() const { return control_; }
  const std::vector<double>& knots() const { return knots_; }
  std::size_t size() const { return control_.size(); }
  const Point& start() const { return control_.front(); }
  const Point& end() const { return control_.back(); }

  Point eval(double t) const;
  /// Samples at t_i = i / (n - 1).
  PointList sample(int n) const;
  /// Evaluation through a precomputed basis matrix (rows must match size()).
  PointList sample(const Eigen::MatrixXd& basis) const;

  /// Replaces the interior control points; endpoints stay fixed.
  void set_interior(const Eigen::VectorXd& coords);
  Eigen::VectorXd interior() const;

 private:
  int degree_ = 3;
  PointList control_;
  std::vector<double> knots_;
};

/// Chord sum over m_quad uniform parameter intervals.
double segment_arc_length(const SplineSegment& seg, int m_quad);

/// True when all control points are collinear and ordered along the chord,
/// in which case the curve is a monotone straight segment.
bool is_straight(const SplineSegment& seg);

}  // namespace hipp
