#include "romctl/sim/rollout.hpp"

#include "romctl/common/error.hpp"

namespace romctl::sim {

double reward_step(const fem::ReducedModel& model, const ReducedState& next,
                   const Task& task, double dt) {
  return task.direction.dot(model.com_map * next.v) * dt;
}

double regularizer_step(const fem::ReducedModel& model, const Task& task,
                        const ReducedState& next,
                        const Eigen::VectorXd& control) {
  double value = task.w_control * control.squaredNorm();
  if (task.w_rot > 0.0) {
    double rot = 0.0;
    for (const int mode : model.rotation_modes) rot += next.v[mode] * next.v[mode];
    value += task.w_rot * rot;
  }
  if (task.w_perp > 0.0) {
    const Eigen::VectorXd v_com = model.com_map * next.v;
    const Eigen::VectorXd perp = v_com - task.direction.dot(v_com) * task.direction;
    value += task.w_perp * perp.squaredNorm();
  }
  return value;
}

double regularizer(const fem::ReducedModel& model, const Task& task,
                   const Trajectory& trajectory, int first, int last) {
  if (last < 0) last = trajectory.length();
  double total = 0.0;
  for (int n = first; n <= last; ++n)
    total += regularizer_step(model, task, trajectory.states[n],
                              trajectory.controls[n - 1]);
  return total;
}

Trajectory rollout(const StepSolver& solver, const ReducedState& start,
                   const Eigen::MatrixXd& control_basis,
                   const mpc::ControlSpline& spline, int steps,
                   const Task& task, SimCounter* counter) {
  const fem::ReducedModel& model = solver.model();
  if (control_basis.rows() != model.num_modes)
    throw ValidationError("control basis row count does not match mode count");
  if (control_basis.cols() != spline.channels())
    throw ValidationError("spline channels do not match control basis columns");
  if (steps > spline.horizon())
    throw ValidationError("rollout longer than the spline horizon");

  Trajectory trajectory;
  trajectory.states.reserve(steps + 1);
  trajectory.states.push_back(start);
  trajectory.controls.reserve(steps);
  trajectory.contacts.reserve(steps);
  trajectory.step_rewards.reserve(steps);

  for (int n = 1; n <= steps; ++n) {
    const Eigen::VectorXd f_c = spline.control_at(n);
    auto [next, contact_set] =
        solver.step(trajectory.states.back(), control_basis * f_c);
    const double r = reward_step(model, next, task, solver.dt());
    trajectory.reward += r;
    trajectory.regularizer += regularizer_step(model, task, next, f_c);
    if (!contact_set.converged) ++trajectory.nonconverged_steps;
    trajectory.step_rewards.push_back(r);
    trajectory.controls.push_back(f_c);
    trajectory.contacts.push_back(std::move(contact_set));
    trajectory.states.push_back(std::move(next));
  }
  if (counter != nullptr) counter->add(1, static_cast<std::uint64_t>(steps));
  return trajectory;
}

}  // namespace romctl::sim
