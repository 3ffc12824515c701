#include "romctl/mpc/spline.hpp"

#include <string>

#include "romctl/common/error.hpp"

namespace romctl::mpc {

Eigen::MatrixXd bernstein_weights(int horizon, int num_points) {
  if (horizon < 1 || num_points < 1 || num_points > horizon)
    throw ValidationError("need horizon >= control points >= 1");
  const int degree = num_points - 1;
  // binomial coefficients C(degree, k)
  Eigen::VectorXd binom(num_points);
  binom[0] = 1.0;
  for (int k = 1; k <= degree; ++k)
    binom[k] = binom[k - 1] * (degree - k + 1) / k;

  Eigen::MatrixXd weights(horizon, num_points);
  for (int n = 0; n < horizon; ++n) {
    const double u = horizon == 1 ? 0.0 : static_cast<double>(n) / (horizon - 1);
    for (int k = 0; k <= degree; ++k)
      weights(n, k) = binom[k] * std::pow(u, k) * std::pow(1.0 - u, degree - k);
  }
  return weights;
}

ControlSpline::ControlSpline(int horizon, Eigen::MatrixXd control_points)
    : horizon_(horizon),
      points_(std::move(control_points)),
      weights_(bernstein_weights(horizon, static_cast<int>(points_.rows()))) {}

ControlSpline ControlSpline::zero(int horizon, int num_points, int channels) {
  return ControlSpline(horizon, Eigen::MatrixXd::Zero(num_points, channels));
}

Eigen::MatrixXd ControlSpline::interpolation_matrix() const {
  const int h = horizon_, k = num_points(), c = channels();
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(h * c, k * c);
  for (int n = 0; n < h; ++n)
    for (int j = 0; j < k; ++j)
      for (int ch = 0; ch < c; ++ch)
        s(n * c + ch, j * c + ch) = weights_(n, j);
  return s;
}

ControlSpline ControlSpline::with_points(Eigen::MatrixXd points) const {
  if (points.rows() != points_.rows() || points.cols() != points_.cols())
    throw ValidationError("control point shape mismatch");
  ControlSpline copy = *this;
  copy.points_ = std::move(points);
  return copy;
}

ControlSpline ControlSpline::shifted(int shift) const {
  if (shift <= 0) return *this;
  const Eigen::MatrixXd sampled = sampled_controls();
  Eigen::MatrixXd target(horizon_, channels());
  for (int n = 0; n < horizon_; ++n)
    target.row(n) = sampled.row(std::min(n + shift, horizon_ - 1));
  // normal equations: Bernstein samples at distinct parameters have full
  // column rank for K <= H
  const Eigen::MatrixXd gram = weights_.transpose() * weights_;
  const Eigen::MatrixXd fit =
      gram.ldlt().solve(weights_.transpose() * target);
  return with_points(fit);
}

}  // namespace romctl::mpc
