#pragma once

#include <Eigen/Dense>

#include <vector>

#include "romctl/fem/modal.hpp"

namespace romctl::fem {

// Dynamics restricted to the modal subspace. The basis is mass-orthonormal,
// so the reduced mass matrix is the identity and reduced forces read as
// accelerations. q_r parameterizes displacement from rest: q = rest + B q_r.
struct ReducedModel {
  int dim = 2;
  int num_nodes = 0;
  int num_modes = 0;
  Eigen::MatrixXd basis;        // dN x M
  Eigen::VectorXd rest;         // dN
  Eigen::VectorXd node_mass;    // N, per-node lumped mass
  double total_mass = 0.0;
  Eigen::MatrixXd stiffness_r;  // M x M (B^T K B)
  Eigen::MatrixXd damping_r;    // M x M (alpha I + beta K_r)
  Eigen::VectorXd eigenvalues;  // M
  std::vector<int> rotation_modes;  // rigid-rotation columns, if any
  Eigen::MatrixXd com_map;      // dim x M: v_com = com_map * v_r
  std::vector<BoundaryFace> boundary;
  Mesh mesh;

  Eigen::VectorXd full_positions(const Eigen::VectorXd& q_r) const {
    return rest + basis * q_r;
  }
  Eigen::VectorXd full_velocities(const Eigen::VectorXd& v_r) const {
    return basis * v_r;
  }
  // -K_r q - D_r v; zero at rest by construction.
  Eigen::VectorXd reduced_force(const Eigen::VectorXd& q_r,
                                const Eigen::VectorXd& v_r) const {
    return -(stiffness_r * q_r) - (damping_r * v_r);
  }
  // dim x M block of basis rows belonging to one node.
  Eigen::Block<const Eigen::MatrixXd> node_rows(int node) const {
    return basis.middleRows(dim * node, dim);
  }
};

// Projects the full model through the basis. Throws ValidationError if the
// basis does not match the model (dimensions or mass-orthonormality).
ReducedModel reduce(const FullModel& model, const BasisMatrix& basis);

}  // namespace romctl::fem
