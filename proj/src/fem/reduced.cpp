#include "romctl/fem/reduced.hpp"

#include "romctl/common/error.hpp"

namespace romctl::fem {

ReducedModel reduce(const FullModel& model, const BasisMatrix& basis) {
  const int dof = model.mesh.dof();
  if (basis.modes.rows() != dof)
    throw ValidationError("basis row count does not match model dofs");
  const int m = basis.size();

  const Eigen::MatrixXd mass_basis =
      model.mass.asDiagonal() * basis.modes;
  const Eigen::MatrixXd gram = basis.modes.transpose() * mass_basis;
  if ((gram - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff() > 1e-6)
    throw ValidationError("basis is not mass-orthonormal for this model");

  ReducedModel reduced;
  reduced.dim = model.mesh.dim;
  reduced.num_nodes = model.mesh.node_count();
  reduced.num_modes = m;
  reduced.basis = basis.modes;
  reduced.rest = model.rest;
  reduced.node_mass.resize(reduced.num_nodes);
  for (int i = 0; i < reduced.num_nodes; ++i)
    reduced.node_mass[i] = model.mass[reduced.dim * i];
  reduced.total_mass = model.total_mass();

  Eigen::MatrixXd k_r = basis.modes.transpose() * model.stiffness * basis.modes;
  k_r = 0.5 * (k_r + k_r.transpose()).eval();
  reduced.stiffness_r = k_r;
  reduced.damping_r = model.material.rayleigh_alpha *
                          Eigen::MatrixXd::Identity(m, m) +
                      model.material.rayleigh_beta * k_r;
  reduced.eigenvalues = basis.eigenvalues;
  for (int c = 0; c < m; ++c)
    if (basis.kinds[c] == ModeKind::rigid_rotation)
      reduced.rotation_modes.push_back(c);

  // mass-weighted mean of node velocities: com_map * v_r
  reduced.com_map = Eigen::MatrixXd::Zero(reduced.dim, m);
  for (int i = 0; i < reduced.num_nodes; ++i)
    reduced.com_map +=
        reduced.node_mass[i] * basis.modes.middleRows(reduced.dim * i, reduced.dim);
  reduced.com_map /= reduced.total_mass;

  reduced.boundary = boundary_faces(model.mesh);
  reduced.mesh = model.mesh;
  return reduced;
}

}  // namespace romctl::fem
