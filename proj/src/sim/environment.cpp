#include "romctl/sim/environment.hpp"

#include <cmath>

#include "romctl/common/error.hpp"

namespace romctl::sim {

void Environment::validate() const {
  if (mode == EnvMode::ground) {
    if (ground.normal.size() == 0 ||
        std::abs(ground.normal.norm() - 1.0) > 1e-9)
      throw ValidationError("ground normal must be a unit vector");
    if (ground.friction < 0.0)
      throw ValidationError("friction coefficient must be non-negative");
  }
  if (fluid.drag_coeff < 0.0 || fluid.density < 0.0)
    throw ValidationError("fluid parameters must be non-negative");
  if (!(contact_tol > 0.0))
    throw ValidationError("contact tolerance must be positive");
}

Environment make_ground_env(int dim, double friction, double offset) {
  Environment env;
  env.mode = EnvMode::ground;
  env.ground.normal = Eigen::VectorXd::Zero(dim);
  env.ground.normal[1] = 1.0;  // y is up
  env.ground.offset = offset;
  env.ground.friction = friction;
  env.gravity = Eigen::VectorXd::Zero(dim);
  env.gravity[1] = -9.8;
  return env;
}

Environment make_fluid_env(int dim, double drag_coeff, double density) {
  Environment env;
  env.mode = EnvMode::fluid;
  env.ground.normal = Eigen::VectorXd::Zero(dim);
  env.ground.normal[1] = 1.0;
  env.ground.offset = -1e9;  // unreachable floor
  env.fluid.drag_coeff = drag_coeff;
  env.fluid.density = density;
  env.gravity = Eigen::VectorXd::Zero(dim);  // neutral buoyancy
  return env;
}

void Task::validate(int dim) const {
  if (direction.size() != dim || std::abs(direction.norm() - 1.0) > 1e-9)
    throw ValidationError("task direction must be a unit vector of the mesh dimension");
  if (w_rot < 0.0 || w_perp < 0.0 || w_control < 0.0)
    throw ValidationError("regularizer weights must be non-negative");
}

}  // namespace romctl::sim
