#pragma once

#include <Eigen/Dense>

#include "romctl/common/counters.hpp"
#include "romctl/mpc/config.hpp"
#include "romctl/mpc/spline.hpp"
#include "romctl/sim/rollout.hpp"

namespace romctl::mpc {

// Sensitivity of the stacked position trajectory (H*M rows) with respect to
// the stacked control points (K*C columns, point-major then channel), by
// central finite differences: exactly 2KC rollouts.
Eigen::MatrixXd gn_jacobian(const sim::StepSolver& solver,
                            const sim::ReducedState& start,
                            const Eigen::MatrixXd& control_basis,
                            const ControlSpline& spline,
                            const MPCConfig& config,
                            SimCounter* counter = nullptr);

struct GnResult {
  ControlSpline spline;
  sim::Trajectory trajectory;  // rollout of the returned spline
  double objective;            // its R - Lambda
  bool accepted;               // false when the line search kept the input
  double alpha;                // accepted step size (0 when rejected)
  int line_search_evals;       // rollouts spent on candidates (and on the
                               // nominal when none was passed in)
  int rollouts;                // total: 2KC + line_search_evals
};

// One ascent iteration on R - Lambda: FD Jacobian, analytic outer gradient
// and PSD curvature of the regularizer (the reward is linear in the states,
// so it contributes no curvature), Levenberg-damped Gauss-Newton direction,
// and a halving line search that never returns a worse spline than its
// input. Pass the rollout of `spline` when already available to avoid one
// extra evaluation.
GnResult gauss_newton_update(const sim::StepSolver& solver,
                             const sim::ReducedState& start,
                             const Eigen::MatrixXd& control_basis,
                             const ControlSpline& spline,
                             const MPCConfig& config, const sim::Task& task,
                             const sim::Trajectory* nominal = nullptr,
                             SimCounter* counter = nullptr);

}  // namespace romctl::mpc
