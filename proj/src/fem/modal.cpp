#include "romctl/fem/modal.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

#include "romctl/common/error.hpp"

namespace romctl::fem {

int BasisMatrix::rigid_count() const {
  int count = 0;
  for (const ModeKind kind : kinds)
    if (kind != ModeKind::elastic) ++count;
  return count;
}

namespace {

// Fix each column's sign so its largest-magnitude entry is positive; eigen
// solvers leave the sign arbitrary and reproducible artifacts need one.
void normalize_column_signs(Eigen::MatrixXd& matrix) {
  for (int c = 0; c < matrix.cols(); ++c) {
    int row = 0;
    matrix.col(c).cwiseAbs().maxCoeff(&row);
    if (matrix(row, c) < 0.0) matrix.col(c) = -matrix.col(c);
  }
}

// Modified Gram-Schmidt in the mass inner product.
void mass_orthonormalize(Eigen::MatrixXd& columns, const Eigen::VectorXd& mass) {
  for (int c = 0; c < columns.cols(); ++c) {
    for (int p = 0; p < c; ++p) {
      const double proj = columns.col(p).dot(mass.cwiseProduct(columns.col(c)));
      columns.col(c) -= proj * columns.col(p);
    }
    const double norm =
        std::sqrt(columns.col(c).dot(mass.cwiseProduct(columns.col(c))));
    if (!(norm > 0.0)) throw NumericError("rank-deficient mode set");
    columns.col(c) /= norm;
  }
}

}  // namespace

PencilModes solve_pencil(const Eigen::MatrixXd& stiffness,
                         const Eigen::VectorXd& mass_diag, int count) {
  const int n = static_cast<int>(stiffness.rows());
  if (count < 1 || count > n)
    throw ValidationError("mode count " + std::to_string(count) +
                          " out of range for " + std::to_string(n) + " dofs");
  if ((mass_diag.array() <= 0.0).any())
    throw ValidationError("mass diagonal must be strictly positive");

  // symmetric reduction: M^-1/2 K M^-1/2 y = lambda y, phi = M^-1/2 y
  const Eigen::VectorXd inv_sqrt = mass_diag.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd reduced =
      inv_sqrt.asDiagonal() * stiffness * inv_sqrt.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      0.5 * (reduced + reduced.transpose()));
  if (solver.info() != Eigen::Success)
    throw NumericError("generalized eigen-solve failed");

  PencilModes result;
  result.values = solver.eigenvalues().head(count);
  result.vectors = inv_sqrt.asDiagonal() * solver.eigenvectors().leftCols(count);
  normalize_column_signs(result.vectors);
  return result;
}

Eigen::MatrixXd rigid_modes(const Mesh& mesh, const Eigen::VectorXd& mass) {
  const int d = mesh.dim;
  const int n = mesh.node_count();
  const int count = d * (d + 1) / 2;
  Eigen::MatrixXd modes = Eigen::MatrixXd::Zero(d * n, count);

  // mass centroid
  Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double m = mass[d * i];
    centroid += m * mesh.nodes.row(i).transpose();
    total += m;
  }
  centroid /= total;

  for (int i = 0; i < n; ++i) {
    for (int axis = 0; axis < d; ++axis) modes(d * i + axis, axis) = 1.0;
    const Eigen::VectorXd r = mesh.nodes.row(i).transpose() - centroid;
    if (d == 2) {
      modes(2 * i, 2) = -r.y();
      modes(2 * i + 1, 2) = r.x();
    } else {
      // infinitesimal rotations e_k x r
      modes(3 * i + 1, 3) = -r.z();
      modes(3 * i + 2, 3) = r.y();
      modes(3 * i, 4) = r.z();
      modes(3 * i + 2, 4) = -r.x();
      modes(3 * i, 5) = -r.y();
      modes(3 * i + 1, 5) = r.x();
    }
  }
  mass_orthonormalize(modes, mass);
  return modes;
}

BasisMatrix modal_basis(const FullModel& model, int num_modes) {
  const int d = model.mesh.dim;
  const int rigid = d * (d + 1) / 2;
  if (num_modes < rigid + 1)
    throw ValidationError("need at least " + std::to_string(rigid + 1) +
                          " modes (rigid set plus one elastic)");
  if (num_modes > model.mesh.dof())
    throw ValidationError("requested " + std::to_string(num_modes) +
                          " modes but the model has only " +
                          std::to_string(model.mesh.dof()) + " dofs");

  const PencilModes pencil =
      solve_pencil(model.stiffness, model.mass, num_modes);

  BasisMatrix basis;
  basis.modes.resize(model.mesh.dof(), num_modes);
  basis.eigenvalues.resize(num_modes);
  basis.kinds.resize(num_modes);

  basis.modes.leftCols(rigid) = rigid_modes(model.mesh, model.mass);
  basis.eigenvalues.head(rigid).setZero();
  for (int c = 0; c < rigid; ++c)
    basis.kinds[c] =
        c < d ? ModeKind::rigid_translation : ModeKind::rigid_rotation;

  for (int c = rigid; c < num_modes; ++c) {
    // project residual rigid content out of the elastic columns so the
    // basis is mass-orthonormal to round-off regardless of solver mixing
    Eigen::VectorXd column = pencil.vectors.col(c);
    for (int p = 0; p < rigid; ++p) {
      const double proj =
          basis.modes.col(p).dot(model.mass.cwiseProduct(column));
      column -= proj * basis.modes.col(p);
    }
    const double norm =
        std::sqrt(column.dot(model.mass.cwiseProduct(column)));
    if (!(norm > 0.0)) throw NumericError("degenerate elastic mode");
    basis.modes.col(c) = column / norm;
    basis.eigenvalues[c] = pencil.values[c];
    basis.kinds[c] = ModeKind::elastic;
  }
  normalize_column_signs(basis.modes);
  return basis;
}

}  // namespace romctl::fem
