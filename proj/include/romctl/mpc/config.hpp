#pragma once

namespace romctl::mpc {

enum class ControllerKind { mppi, gauss_newton };

struct MppiParams {
  int samples = 0;          // 0 -> K * C
  double temperature = 0.05;
  double noise = 1.0;       // perturbation scale sigma_u
  int iterations = 3;       // update rounds per replanning
};

struct GaussNewtonParams {
  int max_iterations = 4;
  double step = 1.0;        // initial ascent step alpha
  double levenberg = 1e-6;  // damping added to the Gauss-Newton matrix
  double fd_step = 1e-4;    // central-difference step, relative to control scale
};

struct MPCConfig {
  int horizon = 40;         // H
  int control_points = 4;   // K
  int control_dim = 2;      // C
  double dt = 0.01;
  ControllerKind controller = ControllerKind::mppi;
  MppiParams mppi;
  GaussNewtonParams gn;
  int replan_interval = 0;  // steps executed per replanning; 0 -> ceil(H/4)
  int threads = 0;          // concurrent rollouts; 0 -> hardware concurrency

  int effective_samples() const {
    return mppi.samples > 0 ? mppi.samples : control_points * control_dim;
  }
  int effective_replan() const {
    return replan_interval > 0 ? replan_interval : (horizon + 3) / 4;
  }
  void validate() const;
};

}  // namespace romctl::mpc
