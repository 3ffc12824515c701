#pragma once

#include <Eigen/Dense>

#include <vector>

#include "romctl/fem/model.hpp"

namespace romctl::fem {

enum class ModeKind { rigid_translation, rigid_rotation, elastic };

// Mass-orthonormal modal basis: B^T M B = I, eigenvalues ascending. The
// first d(d+1)/2 columns are the analytic rigid-body vectors; numeric
// eigenvectors at lambda = 0 are arbitrary mixtures, so they are replaced.
struct BasisMatrix {
  Eigen::MatrixXd modes;        // dN x M
  Eigen::VectorXd eigenvalues;  // M, zeros first
  std::vector<ModeKind> kinds;

  int size() const { return static_cast<int>(modes.cols()); }
  int rigid_count() const;
};

// Smallest `count` eigenpairs of K phi = lambda M phi with diagonal mass,
// mass-orthonormalized. The workhorse behind modal_basis, exposed so the
// pencil math can be checked against hand-built systems.
struct PencilModes {
  Eigen::MatrixXd vectors;
  Eigen::VectorXd values;
};
PencilModes solve_pencil(const Eigen::MatrixXd& stiffness,
                         const Eigen::VectorXd& mass_diag, int count);

// Analytic rigid-body vectors about the mass centroid: d translations
// followed by the rotations, mass-orthonormalized.
Eigen::MatrixXd rigid_modes(const Mesh& mesh, const Eigen::VectorXd& mass);

BasisMatrix modal_basis(const FullModel& model, int num_modes);

}  // namespace romctl::fem
