#pragma once

#include <Eigen/Dense>

namespace romctl::sim {

// Half-plane floor: free space is normal . x >= offset.
struct Ground {
  Eigen::VectorXd normal;
  double offset = 0.0;
  double friction = 0.5;
};

struct Fluid {
  double drag_coeff = 1.0;
  double density = 1000.0;
};

enum class EnvMode { ground, fluid };

struct Environment {
  EnvMode mode = EnvMode::ground;
  Ground ground;
  Fluid fluid;
  Eigen::VectorXd gravity;   // ignored in fluid mode (neutral buoyancy)
  double contact_tol = 1e-3; // activation distance, ~1e-3 x mesh spacing

  void validate() const;
};

Environment make_ground_env(int dim, double friction = 0.5,
                            double offset = 0.0);
Environment make_fluid_env(int dim, double drag_coeff = 1.0,
                           double density = 1000.0);

// Locomotion task: reward is COM travel along `direction`; the regularizer
// penalizes rotation-mode velocity, COM motion orthogonal to the direction,
// and control effort.
struct Task {
  Eigen::VectorXd direction;
  double w_rot = 0.1;
  double w_perp = 0.1;
  double w_control = 1e-4;

  void validate(int dim) const;
};

}  // namespace romctl::sim
