#pragma once

#include <Eigen/Dense>

#include "romctl/common/counters.hpp"
#include "romctl/common/rng.hpp"
#include "romctl/mpc/config.hpp"
#include "romctl/mpc/spline.hpp"
#include "romctl/sim/rollout.hpp"

namespace romctl::mpc {

struct MppiResult {
  ControlSpline spline;
  double best_objective;  // best R - Lambda among sampled rollouts
  double best_reward;
  int rollouts = 0;
};

// Reward-weighted averaging of perturbed control splines. Per round the
// unperturbed spline is sample 0 and samples-1 Gaussian perturbations are
// drawn, every sample is rolled out over the spline horizon, and the new
// control points are the softmax average under temperature tau of the
// objective R - Lambda. Noise is drawn sequentially from the rng and the
// reduction runs in fixed sample order, so results do not depend on how
// many threads execute the rollouts.
MppiResult mppi_update(const sim::StepSolver& solver,
                       const sim::ReducedState& start,
                       const Eigen::MatrixXd& control_basis,
                       const ControlSpline& spline, const MPCConfig& config,
                       const sim::Task& task, Rng& rng,
                       SimCounter* counter = nullptr);

}  // namespace romctl::mpc
