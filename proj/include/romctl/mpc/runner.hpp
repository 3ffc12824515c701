#pragma once

#include <Eigen/Dense>

#include <cstdint>

#include "romctl/common/counters.hpp"
#include "romctl/mpc/config.hpp"
#include "romctl/sim/rollout.hpp"

namespace romctl::mpc {

struct MpcStats {
  std::uint64_t opt_rollouts = 0;
  std::uint64_t opt_steps = 0;
  std::uint64_t executed_steps = 0;
  int replans = 0;
};

struct MpcResult {
  sim::Trajectory trajectory;  // executed steps only
  double reward = 0.0;         // accumulated over executed steps
  double regularizer = 0.0;
  MpcStats stats;
};

// Receding-horizon control: optimize the spline over the H-step horizon
// from the current state (MPPI or Gauss-Newton per config), execute the
// replan interval, shift-and-refit the spline as warm start, repeat until
// total_steps are executed. Deterministic given the seed.
MpcResult mpc_run(const sim::StepSolver& solver,
                  const sim::ReducedState& start,
                  const Eigen::MatrixXd& control_basis, int total_steps,
                  const MPCConfig& config, const sim::Task& task,
                  std::uint64_t seed, SimCounter* opt_counter = nullptr,
                  SimCounter* exec_counter = nullptr);

}  // namespace romctl::mpc
