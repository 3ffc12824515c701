#include <string>

#include "romctl/common/error.hpp"
#include "romctl/fem/model.hpp"

namespace romctl::fem {

void validate_material(const Material& m) {
  if (!(m.youngs_modulus > 0.0))
    throw ValidationError("youngs_modulus must be positive");
  if (!(m.poisson_ratio > 0.0 && m.poisson_ratio < 0.5))
    throw ValidationError("poisson_ratio must lie in (0, 0.5)");
  if (!(m.density > 0.0)) throw ValidationError("density must be positive");
  if (m.rayleigh_alpha < 0.0 || m.rayleigh_beta < 0.0)
    throw ValidationError("rayleigh coefficients must be non-negative");
}

namespace {

// Plane-strain constitutive matrix (engineering shear strain).
Eigen::Matrix3d elasticity_2d(const Material& m) {
  const double e = m.youngs_modulus, nu = m.poisson_ratio;
  const double factor = e / ((1.0 + nu) * (1.0 - 2.0 * nu));
  Eigen::Matrix3d d;
  d << 1.0 - nu, nu, 0.0,
       nu, 1.0 - nu, 0.0,
       0.0, 0.0, 0.5 * (1.0 - 2.0 * nu);
  return factor * d;
}

Eigen::Matrix<double, 6, 6> elasticity_3d(const Material& m) {
  const double e = m.youngs_modulus, nu = m.poisson_ratio;
  const double lambda = e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
  const double mu = e / (2.0 * (1.0 + nu));
  Eigen::Matrix<double, 6, 6> d = Eigen::Matrix<double, 6, 6>::Zero();
  d.topLeftCorner<3, 3>().setConstant(lambda);
  d.topLeftCorner<3, 3>().diagonal().array() += 2.0 * mu;
  d.diagonal().tail<3>().setConstant(mu);
  return d;
}

// Constant-strain triangle: Ke = A * B^T D B with B from shape gradients.
Eigen::Matrix<double, 6, 6> triangle_stiffness(const Eigen::Vector2d& p0,
                                               const Eigen::Vector2d& p1,
                                               const Eigen::Vector2d& p2,
                                               const Eigen::Matrix3d& d,
                                               double area) {
  const double beta[3] = {p1.y() - p2.y(), p2.y() - p0.y(), p0.y() - p1.y()};
  const double gamma[3] = {p2.x() - p1.x(), p0.x() - p2.x(), p1.x() - p0.x()};
  Eigen::Matrix<double, 3, 6> b = Eigen::Matrix<double, 3, 6>::Zero();
  for (int i = 0; i < 3; ++i) {
    b(0, 2 * i) = beta[i];
    b(1, 2 * i + 1) = gamma[i];
    b(2, 2 * i) = gamma[i];
    b(2, 2 * i + 1) = beta[i];
  }
  b /= 2.0 * area;
  return area * b.transpose() * d * b;
}

Eigen::Matrix<double, 12, 12> tet_stiffness(const Eigen::Matrix3d& edges,
                                            const Eigen::Matrix<double, 6, 6>& d,
                                            double volume) {
  // shape gradients: rows of edges^-T for nodes 1..3, node 0 closes the sum
  const Eigen::Matrix3d grad_matrix = edges.inverse().transpose();
  Eigen::Matrix<double, 3, 4> grads;
  grads.col(0) = -grad_matrix.rowwise().sum();
  for (int i = 0; i < 3; ++i) grads.col(i + 1) = grad_matrix.col(i);

  Eigen::Matrix<double, 6, 12> b = Eigen::Matrix<double, 6, 12>::Zero();
  for (int i = 0; i < 4; ++i) {
    const double gx = grads(0, i), gy = grads(1, i), gz = grads(2, i);
    b(0, 3 * i) = gx;
    b(1, 3 * i + 1) = gy;
    b(2, 3 * i + 2) = gz;
    b(3, 3 * i) = gy;
    b(3, 3 * i + 1) = gx;
    b(4, 3 * i + 1) = gz;
    b(4, 3 * i + 2) = gy;
    b(5, 3 * i) = gz;
    b(5, 3 * i + 2) = gx;
  }
  return volume * b.transpose() * d * b;
}

}  // namespace

FullModel assemble(const Mesh& mesh, const Material& material) {
  validate_mesh(mesh);
  validate_material(material);

  const int d = mesh.dim;
  const int dof = mesh.dof();
  FullModel model;
  model.mesh = mesh;
  model.material = material;
  model.rest.resize(dof);
  for (int i = 0; i < mesh.node_count(); ++i)
    model.rest.segment(d * i, d) = mesh.nodes.row(i).transpose();
  model.mass = Eigen::VectorXd::Zero(dof);
  model.stiffness = Eigen::MatrixXd::Zero(dof, dof);

  const Eigen::Matrix3d d2 = d == 2 ? elasticity_2d(material) : Eigen::Matrix3d();
  const Eigen::Matrix<double, 6, 6> d3 =
      d == 3 ? elasticity_3d(material) : Eigen::Matrix<double, 6, 6>();

  for (int e = 0; e < mesh.element_count(); ++e) {
    const double measure = element_measure(mesh, e);
    if (!(measure > 0.0))
      throw AssemblyError("element " + std::to_string(e) +
                          " is inverted or degenerate");
    const auto row = mesh.elements.row(e);
    const int nodes_per = d + 1;
    // row-sum lumped mass: equal share per node of a simplex
    const double node_share = material.density * measure / nodes_per;
    for (int v = 0; v < nodes_per; ++v)
      model.mass.segment(d * row[v], d).array() += node_share;

    if (d == 2) {
      const Eigen::Matrix<double, 6, 6> ke = triangle_stiffness(
          mesh.nodes.row(row[0]), mesh.nodes.row(row[1]), mesh.nodes.row(row[2]),
          d2, measure);
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          model.stiffness.block<2, 2>(2 * row[a], 2 * row[b]) +=
              ke.block<2, 2>(2 * a, 2 * b);
    } else {
      Eigen::Matrix3d edges;
      for (int i = 0; i < 3; ++i)
        edges.col(i) =
            (mesh.nodes.row(row[i + 1]) - mesh.nodes.row(row[0])).transpose();
      const Eigen::Matrix<double, 12, 12> ke = tet_stiffness(edges, d3, measure);
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          model.stiffness.block<3, 3>(3 * row[a], 3 * row[b]) +=
              ke.block<3, 3>(3 * a, 3 * b);
    }
  }
  // exact symmetry so downstream eigen-solves see a symmetric matrix
  model.stiffness = 0.5 * (model.stiffness + model.stiffness.transpose()).eval();
  return model;
}

Eigen::VectorXd FullModel::internal_force(const Eigen::VectorXd& q,
                                          const Eigen::VectorXd& qdot) const {
  Eigen::VectorXd force = -(stiffness * (q - rest));
  force -= material.rayleigh_alpha * mass.cwiseProduct(qdot);
  force -= material.rayleigh_beta * (stiffness * qdot);
  return force;
}

}  // namespace romctl::fem
