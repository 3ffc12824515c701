#pragma once

#include <Eigen/Dense>

#include <atomic>
#include <cstdint>
#include <utility>
#include <vector>

#include "romctl/fem/reduced.hpp"
#include "romctl/sim/environment.hpp"
#include "romctl/sim/state.hpp"

namespace romctl::sim {

// Nodes whose signed distance to the floor is at most tol, with the floor
// normal and the signed gap.
std::vector<Contact> detect_contacts(const fem::ReducedModel& model,
                                     const ReducedState& state,
                                     const Environment& env, double tol);

// Leading-face pressure drag: per boundary facet moving into the fluid the
// force is -c_d rho A max(n.v, 0)^2 n, split over the facet nodes and
// projected through the basis. Zero for faces moving within their plane.
Eigen::VectorXd drag_force(const fem::ReducedModel& model,
                           const ReducedState& state, const Environment& env);

// Implicit-Euler stepper for the forced reduced dynamics. The SPD system
// I + dt D_r + dt^2 K_r is factorized once per (model, environment, dt) and
// shared read-only, so steps may run concurrently.
class StepSolver {
 public:
  StepSolver(const fem::ReducedModel& model, Environment env, double dt);

  // One step under the given control acceleration (already in reduced
  // coordinates, i.e. u_r = B_c f_c). Contact forces are resolved by a
  // staggered normal/friction fixed point against the implicit update.
  std::pair<ReducedState, ContactSet> step(const ReducedState& state,
                                           const Eigen::VectorXd& control) const;

  // Staggered projection on a fixed candidate set: alternates a projected
  // Gauss-Seidel normal solve with a friction-cone tangential solve until
  // the force change drops below 1e-8 or 50 outer iterations pass.
  // v_free is the contact-free implicit velocity; on return *v_out holds
  // the velocity under the solved forces.
  ContactSet solve_contact_forces(std::vector<Contact> candidates,
                                  const Eigen::VectorXd& v_free,
                                  Eigen::VectorXd* v_out) const;

  const fem::ReducedModel& model() const { return *model_; }
  const Environment& environment() const { return env_; }
  double dt() const { return dt_; }

  // apply (I + dt D + dt^2 K)^-1
  Eigen::VectorXd solve_system(const Eigen::VectorXd& rhs) const {
    return system_.solve(rhs);
  }

  std::uint64_t nonconverged_count() const {
    return nonconverged_.load(std::memory_order_relaxed);
  }

 private:
  const fem::ReducedModel* model_;  // referenced; must outlive the solver
  Environment env_;
  double dt_;
  Eigen::LLT<Eigen::MatrixXd> system_;
  Eigen::VectorXd gravity_r_;  // B^T M g, zero in fluid mode
  mutable std::atomic<std::uint64_t> nonconverged_{0};
};

}  // namespace romctl::sim
