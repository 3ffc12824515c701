#include "romctl/fem/mesh.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>

#include "romctl/common/error.hpp"

namespace romctl::fem {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

int node_index_2d(int i, int j, int ny) { return i * ny + j; }

void push_quad_triangles(std::vector<std::array<int, 3>>& tris, int a, int b,
                         int c, int d) {
  // quad corners a=(i,j), b=(i+1,j), c=(i+1,j+1), d=(i,j+1); split along a-c
  tris.push_back({a, b, c});
  tris.push_back({a, c, d});
}

Mesh build_bar_2d(const BarSpec& spec) {
  const int nx = spec.nx, ny = spec.ny;
  const double s = spec.spacing;
  Mesh mesh;
  mesh.dim = 2;
  mesh.nodes.resize(nx * ny, 2);
  const double x0 = -0.5 * (nx - 1) * s;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      mesh.nodes.row(node_index_2d(i, j, ny)) << x0 + i * s, j * s;
    }
  std::vector<std::array<int, 3>> tris;
  for (int i = 0; i + 1 < nx; ++i)
    for (int j = 0; j + 1 < ny; ++j) {
      push_quad_triangles(tris, node_index_2d(i, j, ny),
                          node_index_2d(i + 1, j, ny),
                          node_index_2d(i + 1, j + 1, ny),
                          node_index_2d(i, j + 1, ny));
    }
  mesh.elements.resize(static_cast<int>(tris.size()), 3);
  for (int e = 0; e < static_cast<int>(tris.size()); ++e)
    mesh.elements.row(e) << tris[e][0], tris[e][1], tris[e][2];
  return mesh;
}

Mesh build_cross(const CrossSpec& spec) {
  const int arm = spec.arm_cells, width = spec.arm_width;
  const double s = spec.spacing;
  const int side = 2 * arm + width;  // cells per side of the bounding square
  auto cell_kept = [&](int i, int j) {
    const bool in_band_x = i >= arm && i < arm + width;
    const bool in_band_y = j >= arm && j < arm + width;
    return in_band_x || in_band_y;
  };
  // collect nodes touched by kept cells
  std::map<std::pair<int, int>, int> node_ids;
  auto node_id = [&](int i, int j) {
    auto [it, inserted] = node_ids.try_emplace({i, j}, -1);
    return it;
  };
  for (int i = 0; i < side; ++i)
    for (int j = 0; j < side; ++j)
      if (cell_kept(i, j)) {
        node_id(i, j);
        node_id(i + 1, j);
        node_id(i + 1, j + 1);
        node_id(i, j + 1);
      }
  int next = 0;
  for (auto& [key, id] : node_ids) id = next++;

  Mesh mesh;
  mesh.dim = 2;
  mesh.nodes.resize(next, 2);
  const double x0 = -0.5 * side * s;
  for (const auto& [key, id] : node_ids)
    mesh.nodes.row(id) << x0 + key.first * s, key.second * s;

  std::vector<std::array<int, 3>> tris;
  for (int i = 0; i < side; ++i)
    for (int j = 0; j < side; ++j)
      if (cell_kept(i, j)) {
        push_quad_triangles(tris, node_ids.at({i, j}), node_ids.at({i + 1, j}),
                            node_ids.at({i + 1, j + 1}), node_ids.at({i, j + 1}));
      }
  mesh.elements.resize(static_cast<int>(tris.size()), 3);
  for (int e = 0; e < static_cast<int>(tris.size()); ++e)
    mesh.elements.row(e) << tris[e][0], tris[e][1], tris[e][2];
  return mesh;
}

double tet_volume(const Eigen::MatrixXd& nodes, int a, int b, int c, int d) {
  Eigen::Matrix3d edges;
  edges.col(0) = (nodes.row(b) - nodes.row(a)).transpose();
  edges.col(1) = (nodes.row(c) - nodes.row(a)).transpose();
  edges.col(2) = (nodes.row(d) - nodes.row(a)).transpose();
  return edges.determinant() / 6.0;
}

Mesh build_bar_3d(const BarSpec& spec) {
  const int nx = spec.nx, ny = spec.ny, nz = *spec.nz;
  const double s = spec.spacing;
  Mesh mesh;
  mesh.dim = 3;
  mesh.nodes.resize(nx * ny * nz, 3);
  auto idx = [&](int i, int j, int k) { return (i * ny + j) * nz + k; };
  const double x0 = -0.5 * (nx - 1) * s;
  const double z0 = -0.5 * (nz - 1) * s;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j)
      for (int k = 0; k < nz; ++k)
        mesh.nodes.row(idx(i, j, k)) << x0 + i * s, j * s, z0 + k * s;

  // Kuhn split: six tets per cube, one per monotone lattice path. The split
  // is identical in every cube, so shared faces are conforming.
  const int paths[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                           {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  std::vector<std::array<int, 4>> tets;
  for (int i = 0; i + 1 < nx; ++i)
    for (int j = 0; j + 1 < ny; ++j)
      for (int k = 0; k + 1 < nz; ++k) {
        for (const auto& path : paths) {
          int corner[3] = {i, j, k};
          std::array<int, 4> tet;
          tet[0] = idx(corner[0], corner[1], corner[2]);
          for (int step = 0; step < 3; ++step) {
            corner[path[step]] += 1;
            tet[step + 1] = idx(corner[0], corner[1], corner[2]);
          }
          if (tet_volume(mesh.nodes, tet[0], tet[1], tet[2], tet[3]) < 0.0)
            std::swap(tet[2], tet[3]);
          tets.push_back(tet);
        }
      }
  mesh.elements.resize(static_cast<int>(tets.size()), 4);
  for (int e = 0; e < static_cast<int>(tets.size()); ++e)
    mesh.elements.row(e) << tets[e][0], tets[e][1], tets[e][2], tets[e][3];
  return mesh;
}

}  // namespace

Mesh build_mesh(const MeshSpec& spec) {
  if (spec.kind == MeshSpec::Kind::bar) {
    const BarSpec& bar = spec.bar;
    require(bar.spacing > 0.0, "bar spacing must be positive");
    require(bar.nx >= 2 && bar.ny >= 2, "bar node counts must be >= 2");
    if (bar.nz) {
      require(*bar.nz >= 2, "bar node counts must be >= 2");
      Mesh mesh = build_bar_3d(bar);
      validate_mesh(mesh);
      return mesh;
    }
    Mesh mesh = build_bar_2d(bar);
    validate_mesh(mesh);
    return mesh;
  }
  const CrossSpec& cross = spec.cross;
  require(cross.spacing > 0.0, "cross spacing must be positive");
  require(cross.arm_cells >= 2 && cross.arm_width >= 2,
          "cross cell counts must be >= 2");
  Mesh mesh = build_cross(cross);
  validate_mesh(mesh);
  return mesh;
}

double element_measure(const Mesh& mesh, int element) {
  const auto row = mesh.elements.row(element);
  if (mesh.dim == 2) {
    const Eigen::Vector2d a = mesh.nodes.row(row[0]);
    const Eigen::Vector2d b = mesh.nodes.row(row[1]);
    const Eigen::Vector2d c = mesh.nodes.row(row[2]);
    const Eigen::Vector2d u = b - a, v = c - a;
    return 0.5 * (u.x() * v.y() - u.y() * v.x());
  }
  return tet_volume(mesh.nodes, row[0], row[1], row[2], row[3]);
}

double total_volume(const Mesh& mesh) {
  double volume = 0.0;
  for (int e = 0; e < mesh.element_count(); ++e)
    volume += element_measure(mesh, e);
  return volume;
}

void validate_mesh(const Mesh& mesh) {
  require(mesh.dim == 2 || mesh.dim == 3, "mesh dimension must be 2 or 3");
  require(mesh.node_count() >= mesh.dim + 1, "mesh has too few nodes");
  require(mesh.element_count() >= 1, "mesh has no elements");
  require(mesh.elements.cols() == mesh.dim + 1,
          "element arity does not match dimension");
  const int n = mesh.node_count();
  for (int e = 0; e < mesh.element_count(); ++e) {
    std::set<int> seen;
    for (int v = 0; v <= mesh.dim; ++v) {
      const int node = mesh.elements(e, v);
      require(node >= 0 && node < n,
              "element " + std::to_string(e) + " references node out of range");
      require(seen.insert(node).second,
              "element " + std::to_string(e) + " repeats a node");
    }
    require(element_measure(mesh, e) > 0.0,
            "element " + std::to_string(e) + " has non-positive measure");
  }
  // connectivity via union-find over element node sets
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i;
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int e = 0; e < mesh.element_count(); ++e)
    for (int v = 1; v <= mesh.dim; ++v)
      parent[find(mesh.elements(e, v))] = find(mesh.elements(e, 0));
  const int root = find(0);
  for (int i = 1; i < n; ++i)
    require(find(i) == root, "mesh is not a single connected component");
}

std::vector<BoundaryFace> boundary_faces(const Mesh& mesh) {
  // facets keyed by sorted node tuple; boundary facets occur exactly once
  std::map<std::array<int, 3>, std::pair<std::array<int, 3>, int>> facets;
  auto visit = [&](std::array<int, 3> nodes, int opposite) {
    std::array<int, 3> key = nodes;
    std::sort(key.begin(), key.end());
    auto it = facets.find(key);
    if (it == facets.end())
      facets.emplace(key, std::make_pair(nodes, opposite));
    else
      it->second.second = -2;  // interior, shared by two elements
  };
  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto row = mesh.elements.row(e);
    if (mesh.dim == 2) {
      visit({row[0], row[1], -1}, row[2]);
      visit({row[1], row[2], -1}, row[0]);
      visit({row[2], row[0], -1}, row[1]);
    } else {
      visit({row[1], row[2], row[3]}, row[0]);
      visit({row[0], row[2], row[3]}, row[1]);
      visit({row[0], row[1], row[3]}, row[2]);
      visit({row[0], row[1], row[2]}, row[3]);
    }
  }
  std::vector<BoundaryFace> result;
  for (const auto& [key, value] : facets) {
    if (value.second == -2) continue;
    BoundaryFace face;
    face.nodes = value.first;
    face.count = mesh.dim;
    const int opposite = value.second;
    // orient so the rest-shape normal points away from the opposite vertex
    if (mesh.dim == 2) {
      const Eigen::Vector2d a = mesh.nodes.row(face.nodes[0]);
      const Eigen::Vector2d b = mesh.nodes.row(face.nodes[1]);
      const Eigen::Vector2d c = mesh.nodes.row(opposite);
      const Eigen::Vector2d edge = b - a;
      const Eigen::Vector2d normal(edge.y(), -edge.x());
      if (normal.dot(c - a) > 0.0) std::swap(face.nodes[0], face.nodes[1]);
    } else {
      const Eigen::Vector3d a = mesh.nodes.row(face.nodes[0]);
      const Eigen::Vector3d b = mesh.nodes.row(face.nodes[1]);
      const Eigen::Vector3d c = mesh.nodes.row(face.nodes[2]);
      const Eigen::Vector3d d = mesh.nodes.row(opposite);
      const Eigen::Vector3d normal = (b - a).cross(c - a);
      if (normal.dot(d - a) > 0.0) std::swap(face.nodes[1], face.nodes[2]);
    }
    result.push_back(face);
  }
  return result;
}

void facet_normal_area(const Mesh& mesh, const BoundaryFace& face,
                       const Eigen::VectorXd& positions,
                       Eigen::VectorXd& normal, double& area) {
  const int d = mesh.dim;
  auto pos = [&](int node) {
    return positions.segment(d * node, d);
  };
  if (d == 2) {
    const Eigen::Vector2d a = pos(face.nodes[0]);
    const Eigen::Vector2d b = pos(face.nodes[1]);
    const Eigen::Vector2d edge = b - a;
    area = edge.norm();
    normal.resize(2);
    if (area > 0.0)
      normal << edge.y() / area, -edge.x() / area;
    else
      normal.setZero();
    return;
  }
  const Eigen::Vector3d a = pos(face.nodes[0]);
  const Eigen::Vector3d b = pos(face.nodes[1]);
  const Eigen::Vector3d c = pos(face.nodes[2]);
  const Eigen::Vector3d cross = (b - a).cross(c - a);
  area = 0.5 * cross.norm();
  normal.resize(3);
  if (area > 0.0)
    normal = cross.normalized();
  else
    normal.setZero();
}

}  // namespace romctl::fem
