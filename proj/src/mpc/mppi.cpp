#include "romctl/mpc/mppi.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "romctl/common/error.hpp"
#include "romctl/common/parallel.hpp"

namespace romctl::mpc {

void MPCConfig::validate() const {
  if (control_points < 1 || horizon < control_points)
    throw ValidationError("need horizon >= control_points >= 1");
  if (control_dim < 1) throw ValidationError("control_dim must be >= 1");
  if (!(dt > 0.0)) throw ValidationError("dt must be positive");
  if (mppi.samples < 0 || mppi.iterations < 1 || !(mppi.temperature > 0.0) ||
      !(mppi.noise > 0.0))
    throw ValidationError("invalid mppi parameters");
  if (gn.max_iterations < 1 || !(gn.step > 0.0) || !(gn.levenberg > 0.0) ||
      !(gn.fd_step > 0.0))
    throw ValidationError("invalid gauss-newton parameters");
  if (replan_interval < 0 || threads < 0)
    throw ValidationError("replan_interval and threads must be non-negative");
}

MppiResult mppi_update(const sim::StepSolver& solver,
                       const sim::ReducedState& start,
                       const Eigen::MatrixXd& control_basis,
                       const ControlSpline& spline, const MPCConfig& config,
                       const sim::Task& task, Rng& rng, SimCounter* counter) {
  const int samples = config.effective_samples();
  if (samples < 1) throw ValidationError("mppi needs at least one sample");
  const int k = spline.num_points();
  const int c = spline.channels();

  ControlSpline current = spline;
  double best_objective = -std::numeric_limits<double>::infinity();
  double best_reward = 0.0;
  int rollouts = 0;

  for (int round = 0; round < config.mppi.iterations; ++round) {
    // sample 0 is the unperturbed spline, so a tau -> 0 update can never be
    // worse than the current iterate
    std::vector<Eigen::MatrixXd> points(samples);
    points[0] = current.control_points();
    for (int s = 1; s < samples; ++s) {
      Eigen::MatrixXd noise(k, c);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < c; ++j) noise(i, j) = rng.normal();
      points[s] = current.control_points() + config.mppi.noise * noise;
    }

    std::vector<double> objective(samples), reward(samples);
    parallel_for(samples, config.threads, [&](int s) {
      const sim::Trajectory traj =
          sim::rollout(solver, start, control_basis, current.with_points(points[s]),
                       spline.horizon(), task, counter);
      objective[s] = traj.reward - traj.regularizer;
      reward[s] = traj.reward;
    });
    rollouts += samples;

    double max_objective = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < samples; ++s)
      max_objective = std::max(max_objective, objective[s]);
    if (!std::isfinite(max_objective))
      throw NumericError("all mppi rollouts produced non-finite objectives");

    // softmax weights with the max subtracted for numerical stability
    Eigen::VectorXd weights(samples);
    for (int s = 0; s < samples; ++s) {
      const double j = objective[s];
      weights[s] = std::isfinite(j)
                       ? std::exp((j - max_objective) / config.mppi.temperature)
                       : 0.0;
    }
    weights /= weights.sum();

    Eigen::MatrixXd averaged = Eigen::MatrixXd::Zero(k, c);
    for (int s = 0; s < samples; ++s) averaged += weights[s] * points[s];
    current = current.with_points(std::move(averaged));

    for (int s = 0; s < samples; ++s)
      if (objective[s] > best_objective) {
        best_objective = objective[s];
        best_reward = reward[s];
      }
  }
  return {std::move(current), best_objective, best_reward, rollouts};
}

}  // namespace romctl::mpc
