#include "romctl/mpc/runner.hpp"

#include <algorithm>

#include "romctl/common/error.hpp"
#include "romctl/common/rng.hpp"
#include "romctl/mpc/gauss_newton.hpp"
#include "romctl/mpc/mppi.hpp"

namespace romctl::mpc {

MpcResult mpc_run(const sim::StepSolver& solver,
                  const sim::ReducedState& start,
                  const Eigen::MatrixXd& control_basis, int total_steps,
                  const MPCConfig& config, const sim::Task& task,
                  std::uint64_t seed, SimCounter* opt_counter,
                  SimCounter* exec_counter) {
  config.validate();
  if (total_steps < 1) throw ValidationError("total_steps must be >= 1");
  if (control_basis.cols() != config.control_dim)
    throw ValidationError("control basis columns do not match control_dim");

  Rng rng(mix_seed(seed, 0x6d7063ULL));  // one stream per run
  SimCounter local_opt;
  SimCounter* opt = opt_counter != nullptr ? opt_counter : &local_opt;
  const std::uint64_t rollouts_before = opt->rollouts.load();
  const std::uint64_t steps_before = opt->steps.load();

  MpcResult result;
  result.trajectory.states.push_back(start);

  ControlSpline spline =
      ControlSpline::zero(config.horizon, config.control_points, config.control_dim);
  sim::ReducedState state = start;

  int executed = 0;
  while (executed < total_steps) {
    // optimize over the full horizon from the current state
    if (config.controller == ControllerKind::mppi) {
      MppiResult update =
          mppi_update(solver, state, control_basis, spline, config, task, rng, opt);
      spline = std::move(update.spline);
    } else {
      const sim::Trajectory* nominal = nullptr;
      sim::Trajectory last;
      for (int it = 0; it < config.gn.max_iterations; ++it) {
        GnResult update = gauss_newton_update(solver, state, control_basis,
                                              spline, config, task, nominal, opt);
        spline = std::move(update.spline);
        last = std::move(update.trajectory);
        nominal = &last;
        if (!update.accepted) break;  // stationary or line search exhausted
      }
    }
    ++result.stats.replans;

    // execute the first segment of the optimized controls
    const int segment = std::min(config.effective_replan(), total_steps - executed);
    const sim::Trajectory executed_traj = sim::rollout(
        solver, state, control_basis, spline, segment, task, exec_counter);
    for (int n = 1; n <= segment; ++n) {
      result.trajectory.states.push_back(executed_traj.states[n]);
      result.trajectory.controls.push_back(executed_traj.controls[n - 1]);
      result.trajectory.contacts.push_back(executed_traj.contacts[n - 1]);
      result.trajectory.step_rewards.push_back(executed_traj.step_rewards[n - 1]);
    }
    result.trajectory.nonconverged_steps += executed_traj.nonconverged_steps;
    result.reward += executed_traj.reward;
    result.regularizer += executed_traj.regularizer;
    state = executed_traj.states[segment];
    executed += segment;
    result.stats.executed_steps += segment;

    if (executed < total_steps) spline = spline.shifted(segment);
  }
  result.trajectory.reward = result.reward;
  result.trajectory.regularizer = result.regularizer;
  result.stats.opt_rollouts = opt->rollouts.load() - rollouts_before;
  result.stats.opt_steps = opt->steps.load() - steps_before;
  return result;
}

}  // namespace romctl::mpc
