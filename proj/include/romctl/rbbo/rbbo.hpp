#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "romctl/mpc/runner.hpp"
#include "romctl/rbbo/dataset.hpp"

namespace romctl::rbbo {

struct RbboConfig {
  int iterations = 40;       // acquisition loop length N
  int initial_design = 5;    // n0 random bases evaluated up front
  int t_max = 300;           // full-fidelity trajectory length
  double boca_threshold = 0.5;
  bool multi_fidelity = true;    // false: every evaluation runs at t_max
  bool normalize_fidelity = true;  // GP targets rescaled by t_max / T
  double beta = 0.0;         // fixed UCB beta; 0 -> logarithmic schedule
  int hyperopt_interval = 5; // re-optimize kernel params every k records
  std::uint64_t seed = 0;
  double wall_budget_s = 0.0;  // 0 -> unlimited; gates the acquisition loop
  std::string dataset_path;    // optional JSONL persistence

  void validate() const;
};

struct ProgressPoint {
  int index = 0;          // record index, 1-based
  double wall_time_s = 0; // cumulative since the run started
  int fidelity = 0;
  double reward = 0;
  double best_at_tmax = 0;  // running max over full-fidelity records; NaN
                            // until the first one exists
};

struct RbboResult {
  Eigen::MatrixXd best_basis;
  double best_reward = 0.0;
  std::vector<EvalRecord> records;
  std::vector<ProgressPoint> series;
  std::uint64_t executed_steps = 0;    // trajectory steps simulated here
  std::uint64_t opt_rollouts = 0;      // controller-internal rollouts
  std::uint64_t opt_rollout_steps = 0;
};

// GP training target of a record: the reward, rescaled to full-fidelity
// scale when normalization is enabled. The regularizer never enters; the
// outer problem scores raw task reward while the inner MPC optimizes
// reward minus regularizer.
double gp_target(const EvalRecord& record, const RbboConfig& config);

// B_c = first C columns of the identity: direct control of the C most
// salient modes, evaluated at full fidelity.
EvalRecord identity_baseline(const sim::StepSolver& solver,
                             const sim::Task& task,
                             const mpc::MPCConfig& mpc_config, int t_max,
                             std::uint64_t seed);

// The outer loop: initial design at the lowest ladder fidelity, then
// fit-GP / maximize-UCB / pick-fidelity / evaluate until the iteration or
// wall budget is exhausted; returns the best full-fidelity basis, after a
// single re-evaluation when no record exists at t_max. Every random draw is
// keyed to the dataset size, so resuming from a persisted prefix reproduces
// the uninterrupted run exactly.
RbboResult rbbo(const sim::StepSolver& solver, const sim::Task& task,
                const RbboConfig& config, const mpc::MPCConfig& mpc_config,
                std::vector<EvalRecord> resume = {});

struct CompareReport {
  RbboResult multi_fidelity;   // ladder fidelities (BOCA)
  RbboResult single_fidelity;  // every evaluation at t_max (plain BO)
  double budget_s = 0.0;
};

// Runs the loop twice under the same wall budget and seed, with and without
// the fidelity ladder.
CompareReport compare_bo_vs_boca(const sim::StepSolver& solver,
                                 const sim::Task& task, RbboConfig config,
                                 const mpc::MPCConfig& mpc_config,
                                 double wall_budget_s);

}  // namespace romctl::rbbo
