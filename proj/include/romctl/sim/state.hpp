#pragma once

#include <Eigen/Dense>

#include <vector>

namespace romctl::sim {

struct ReducedState {
  Eigen::VectorXd q;  // modal displacement from rest
  Eigen::VectorXd v;  // modal velocity
  double t = 0.0;
};

inline ReducedState rest_state(int num_modes) {
  return {Eigen::VectorXd::Zero(num_modes), Eigen::VectorXd::Zero(num_modes),
          0.0};
}

struct Contact {
  int node = -1;
  Eigen::VectorXd normal;  // points into free space
  double gap = 0.0;        // signed distance at detection
  Eigen::VectorXd force;   // full-space force on the node
};

struct ContactSet {
  std::vector<Contact> contacts;
  Eigen::VectorXd reduced_force;  // sum over contacts of basis-rows^T force
  int stagger_iterations = 0;
  bool converged = true;

  bool empty() const { return contacts.empty(); }
};

struct Trajectory {
  std::vector<ReducedState> states;       // [0..T]
  std::vector<Eigen::VectorXd> controls;  // [1..T], control-space coordinates
  std::vector<ContactSet> contacts;       // per executed step
  std::vector<double> step_rewards;       // per executed step
  double reward = 0.0;
  double regularizer = 0.0;
  int nonconverged_steps = 0;

  int length() const { return static_cast<int>(controls.size()); }
};

}  // namespace romctl::sim
