#pragma once

#include <Eigen/Dense>

namespace romctl::mpc {

// Bernstein weights of a degree K-1 Bezier curve sampled at H evenly spaced
// parameters u_n = (n-1)/(H-1) (u = 0 when H = 1). Rows are non-negative and
// sum to one; rows 1 and H reproduce the first and last control point.
Eigen::MatrixXd bernstein_weights(int horizon, int num_points);

// Spline-parameterized control signal: K control points in R^C, sampled to
// H per-step controls through the Bernstein weight matrix.
class ControlSpline {
 public:
  ControlSpline(int horizon, Eigen::MatrixXd control_points);
  static ControlSpline zero(int horizon, int num_points, int channels);

  int horizon() const { return horizon_; }
  int num_points() const { return static_cast<int>(points_.rows()); }
  int channels() const { return static_cast<int>(points_.cols()); }
  const Eigen::MatrixXd& control_points() const { return points_; }
  const Eigen::MatrixXd& weights() const { return weights_; }

  // 1-based step index
  Eigen::VectorXd control_at(int step) const {
    return (weights_.row(step - 1) * points_).transpose();
  }
  Eigen::MatrixXd sampled_controls() const { return weights_ * points_; }

  // HC x KC interpolation matrix acting on stacked control points
  Eigen::MatrixXd interpolation_matrix() const;

  // same weights, new control points
  ControlSpline with_points(Eigen::MatrixXd points) const;

  // Warm-start refit after executing `shift` steps: least-squares fit of the
  // control points to the sampled signal advanced by `shift` with the final
  // sample held. A constant spline shifts to itself exactly.
  ControlSpline shifted(int shift) const;

 private:
  int horizon_;
  Eigen::MatrixXd points_;   // K x C
  Eigen::MatrixXd weights_;  // H x K
};

}  // namespace romctl::mpc
