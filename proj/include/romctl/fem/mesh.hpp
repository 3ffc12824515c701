#pragma once

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <vector>

namespace romctl::fem {

// Simplicial mesh: triangles in 2D, tetrahedra in 3D. Node coordinates are
// rest positions; the y axis is "up" in both dimensions.
struct Mesh {
  int dim = 2;
  Eigen::MatrixXd nodes;     // N x dim
  Eigen::MatrixXi elements;  // E x (dim + 1)

  int node_count() const { return static_cast<int>(nodes.rows()); }
  int element_count() const { return static_cast<int>(elements.rows()); }
  int dof() const { return dim * node_count(); }
};

// Rectangular lattice; counts are nodes per direction (>= 2 each).
struct BarSpec {
  int nx = 2;
  int ny = 2;
  std::optional<int> nz;  // set for a 3D bar
  double spacing = 1.0;
};

// Plus-shaped 2D lattice; counts are cells (>= 2 each). The footprint is a
// (2L+W) x (2L+W) cell grid with the four L x L corners removed.
struct CrossSpec {
  int arm_cells = 2;
  int arm_width = 2;
  double spacing = 1.0;
};

struct MeshSpec {
  enum class Kind { bar, cross };
  Kind kind = Kind::bar;
  BarSpec bar;
  CrossSpec cross;

  double spacing() const {
    return kind == Kind::bar ? bar.spacing : cross.spacing;
  }
};

// Builds the mesh centered on x (and z) with min y = 0, so bodies rest on a
// ground plane at offset 0. Throws ValidationError on a degenerate spec.
Mesh build_mesh(const MeshSpec& spec);

// Index bounds, no repeated node per element, positive signed measures,
// single connected component. Throws ValidationError.
void validate_mesh(const Mesh& mesh);

double element_measure(const Mesh& mesh, int element);  // signed area/volume
double total_volume(const Mesh& mesh);

// Boundary facet (edge in 2D, triangle in 3D). Node order is chosen so the
// normal computed from positions points outward; see facet_normal_area.
struct BoundaryFace {
  std::array<int, 3> nodes{{-1, -1, -1}};
  int count = 2;
};

std::vector<BoundaryFace> boundary_faces(const Mesh& mesh);

// Outward unit normal and measure (length/area) of a facet evaluated at the
// given node positions (flattened, length dim*N).
void facet_normal_area(const Mesh& mesh, const BoundaryFace& face,
                       const Eigen::VectorXd& positions,
                       Eigen::VectorXd& normal, double& area);

}  // namespace romctl::fem
