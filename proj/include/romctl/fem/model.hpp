#pragma once

#include <Eigen/Dense>

#include "romctl/fem/material.hpp"
#include "romctl/fem/mesh.hpp"

namespace romctl::fem {

// Discrete elastic model with row-sum lumped mass:
//   f(q, qdot) = -K (q - rest) - (alpha M + beta K) qdot
struct FullModel {
  Mesh mesh;
  Material material;
  Eigen::VectorXd rest;       // dN flattened rest positions
  Eigen::VectorXd mass;       // dN lumped diagonal
  Eigen::MatrixXd stiffness;  // dN x dN, symmetric PSD

  Eigen::VectorXd internal_force(const Eigen::VectorXd& q,
                                 const Eigen::VectorXd& qdot) const;
  double total_mass() const { return mass.sum() / mesh.dim; }
};

// Linear FEM assembly (plane-strain CST in 2D, linear tetrahedra in 3D).
// Throws AssemblyError naming the element if one is inverted.
FullModel assemble(const Mesh& mesh, const Material& material);

}  // namespace romctl::fem
