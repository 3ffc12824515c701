#pragma once

#include <Eigen/Dense>

#include "romctl/common/counters.hpp"
#include "romctl/mpc/spline.hpp"
#include "romctl/sim/stepper.hpp"

namespace romctl::sim {

// One step of reward: travel of the mass-weighted COM along the task
// direction, d . v_com dt.
double reward_step(const fem::ReducedModel& model, const ReducedState& next,
                   const Task& task, double dt);

// Regularizer contribution of step n (1-based): rotation-mode velocity,
// COM velocity orthogonal to the direction, and control effort, each
// squared under its weight.
double regularizer_step(const fem::ReducedModel& model, const Task& task,
                        const ReducedState& next,
                        const Eigen::VectorXd& control);

// Recomputes the regularizer of a stored trajectory over steps
// [first, last] (1-based, inclusive; last = -1 means the full length).
double regularizer(const fem::ReducedModel& model, const Task& task,
                   const Trajectory& trajectory, int first = 1, int last = -1);

// Rolls the spline-driven dynamics for `steps` steps (at most the spline
// horizon): per step the control-space force is the spline sample and the
// reduced actuation is control_basis * f_c. Pure function of its inputs.
Trajectory rollout(const StepSolver& solver, const ReducedState& start,
                   const Eigen::MatrixXd& control_basis,
                   const mpc::ControlSpline& spline, int steps,
                   const Task& task, SimCounter* counter = nullptr);

}  // namespace romctl::sim
