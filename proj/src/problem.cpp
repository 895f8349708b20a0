#include "ddsolver/problem.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace dds {

bool HexMesh::on_boundary(Index id) const noexcept {
  const Index i = id % nx;
  const Index j = (id / nx) % ny;
  const Index k = id / (nx * ny);
  return i == 0 || j == 0 || k == 0 || i == nx - 1 || j == ny - 1 || k == nz - 1;
}

HexMesh build_grid(Index nx, Index ny, Index nz, double h) {
  require(nx >= 2 && ny >= 2 && nz >= 2, ErrorCode::kInvalidArgument,
          "grid needs at least 2 nodes per axis");
  require(h > 0.0, ErrorCode::kInvalidArgument, "grid spacing must be positive");
  return HexMesh{nx, ny, nz, h};
}

template <typename T>
MaterialField<T> sphere_material(const HexMesh& mesh, std::array<double, 3> center,
                                 double radius, T eps_in) {
  require(radius >= 0.0, ErrorCode::kInvalidArgument, "negative sphere radius");
  MaterialField<T> m;
  m.eps.assign(static_cast<std::size_t>(mesh.cell_count()), T(1));
  if (radius == 0.0) return m;
  std::size_t c = 0;
  for (Index k = 0; k + 1 < mesh.nz; ++k)
    for (Index j = 0; j + 1 < mesh.ny; ++j)
      for (Index i = 0; i + 1 < mesh.nx; ++i, ++c) {
        const double dx = (i + 0.5) * mesh.h - center[0];
        const double dy = (j + 0.5) * mesh.h - center[1];
        const double dz = (k + 0.5) * mesh.h - center[2];
        if (std::sqrt(dx * dx + dy * dy + dz * dz) <= radius) m.eps[c] = eps_in;
      }
  return m;
}

namespace {

struct ElementPair {
  std::array<double, 64> stiffness{};
  std::array<double, 64> mass{};
};

ElementPair unit_quadrature(double h) {
  const double g = 1.0 / std::sqrt(3.0);
  const double pts[2] = {-g, g};
  const double det = h * h * h / 8.0;
  const double scale = 2.0 / h;
  ElementPair e;
  for (double xi : pts)
    for (double eta : pts)
      for (double zeta : pts) {
        double n[8], dn[8][3];
        for (int a = 0; a < 8; ++a) {
          const double sx = (a & 1) ? 1.0 : -1.0;
          const double sy = (a & 2) ? 1.0 : -1.0;
          const double sz = (a & 4) ? 1.0 : -1.0;
          const double fx = 1.0 + sx * xi, fy = 1.0 + sy * eta, fz = 1.0 + sz * zeta;
          n[a] = fx * fy * fz / 8.0;
          dn[a][0] = sx * fy * fz / 8.0 * scale;
          dn[a][1] = fx * sy * fz / 8.0 * scale;
          dn[a][2] = fx * fy * sz / 8.0 * scale;
        }
        for (int a = 0; a < 8; ++a)
          for (int b = 0; b < 8; ++b) {
            e.stiffness[a * 8 + b] +=
                (dn[a][0] * dn[b][0] + dn[a][1] * dn[b][1] + dn[a][2] * dn[b][2]) * det;
            e.mass[a * 8 + b] += n[a] * n[b] * det;
          }
      }
  return e;
}

}  // namespace

template <typename T>
DenseMatrix<T> element_matrices(double h, T eps, double wavenumber) {
  require(h > 0.0, ErrorCode::kInvalidArgument, "element size must be positive");
  const ElementPair q = unit_quadrature(h);
  const T shift = wavenumber * wavenumber * eps;
  DenseMatrix<T> e(8, 8);
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b) e(a, b) = T(q.stiffness[a * 8 + b]) - shift * q.mass[a * 8 + b];
  return e;
}

template <typename T>
AssembledSystem<T> assemble(const HexMesh& mesh, const MaterialField<T>& mat, double wavenumber) {
  require(mat.eps.size() == static_cast<std::size_t>(mesh.cell_count()),
          ErrorCode::kDimensionMismatch, "material size != cell count");
  AssembledSystem<T> sys;
  sys.interior_of_node.assign(static_cast<std::size_t>(mesh.node_count()), -1);
  for (Index id = 0; id < mesh.node_count(); ++id)
    if (!mesh.on_boundary(id)) {
      sys.interior_of_node[id] = static_cast<Index>(sys.node_of_interior.size());
      sys.node_of_interior.push_back(id);
    }
  const Index n = static_cast<Index>(sys.node_of_interior.size());
  const ElementPair q = unit_quadrature(mesh.h);
  const double k2 = wavenumber * wavenumber;

  std::vector<Triplet<T>> trips;
  trips.reserve(static_cast<std::size_t>(n) * 27 / 2 + 64);
  std::size_t c = 0;
  for (Index k = 0; k + 1 < mesh.nz; ++k)
    for (Index j = 0; j + 1 < mesh.ny; ++j)
      for (Index i = 0; i + 1 < mesh.nx; ++i, ++c) {
        Index local[8];
        for (int a = 0; a < 8; ++a)
          local[a] = sys.interior_of_node[mesh.node(i + (a & 1), j + ((a >> 1) & 1), k + (a >> 2))];
        const T shift = k2 * mat.eps[c];
        for (int a = 0; a < 8; ++a) {
          if (local[a] < 0) continue;
          for (int b = 0; b <= a; ++b) {
            if (local[b] < 0) continue;
            const T v = T(q.stiffness[a * 8 + b]) - shift * q.mass[a * 8 + b];
            trips.push_back({local[a], local[b], v});
          }
        }
      }
  sys.a = from_triplets<T>(n, trips);
  return sys;
}

template <typename T>
DenseMatrix<T> point_source_rhs(std::span<const Index> interior_of_node,
                                std::span<const Index> source_nodes, Index n_interior) {
  DenseMatrix<T> b(n_interior, static_cast<Index>(source_nodes.size()));
  for (std::size_t s = 0; s < source_nodes.size(); ++s) {
    const Index node = source_nodes[s];
    require(node >= 0 && static_cast<std::size_t>(node) < interior_of_node.size(),
            ErrorCode::kInvalidArgument, "source node out of range");
    const Index row = interior_of_node[node];
    require(row >= 0, ErrorCode::kInvalidArgument, "source node lies on the Dirichlet boundary");
    require(row < n_interior, ErrorCode::kInvalidArgument, "source maps outside the system");
    b(row, static_cast<Index>(s)) = T(1);
  }
  return b;
}

template <typename T>
GeneratedProblem<T> array_problem(Index rows, Index cols, Index spacing, Index nx, Index ny,
                                  Index nz, double wavenumber) {
  require(rows >= 1 && cols >= 1 && spacing >= 1, ErrorCode::kInvalidArgument,
          "array dimensions and spacing must be positive");
  const HexMesh mesh = build_grid(nx, ny, nz, 1.0 / (std::max({nx, ny, nz}) - 1));
  const Index span_x = (cols - 1) * spacing;
  const Index span_y = (rows - 1) * spacing;
  const Index i0 = (nx - 1 - span_x) / 2;
  const Index j0 = (ny - 1 - span_y) / 2;
  const Index kz = (nz - 1) / 2;
  require(i0 >= 1 && i0 + span_x <= nx - 2 && j0 >= 1 && j0 + span_y <= ny - 2 && kz >= 1 &&
              kz <= nz - 2,
          ErrorCode::kInvalidArgument, "source array does not fit inside the mesh interior");
  MaterialField<T> mat;
  mat.eps.assign(static_cast<std::size_t>(mesh.cell_count()), T(1));
  GeneratedProblem<T> p;
  p.system = assemble(mesh, mat, wavenumber);
  std::vector<Index> sources;
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) sources.push_back(mesh.node(i0 + c * spacing, j0 + r * spacing, kz));
  p.rhs = point_source_rhs<T>(p.system.interior_of_node, sources, p.system.a.n);
  return p;
}

template <typename T>
GeneratedProblem<T> sphere_problem(Index nodes, T eps_in, double wavenumber, Index rhs_count,
                                   std::uint64_t seed) {
  require(nodes >= 3, ErrorCode::kInvalidArgument, "sphere problem needs >= 3 nodes per axis");
  require(rhs_count >= 1, ErrorCode::kInvalidArgument, "rhs count must be positive");
  const HexMesh mesh = build_grid(nodes, nodes, nodes, 1.0 / (nodes - 1));
  const MaterialField<T> mat = sphere_material(mesh, {0.5, 0.5, 0.5}, 0.3, eps_in);
  GeneratedProblem<T> p;
  p.system = assemble(mesh, mat, wavenumber);
  std::mt19937_64 rng(seed);
  const auto n = static_cast<std::uint64_t>(p.system.a.n);
  std::vector<Index> sources(rhs_count);
  for (auto& s : sources) s = p.system.node_of_interior[static_cast<Index>(rng() % n)];
  p.rhs = point_source_rhs<T>(p.system.interior_of_node, sources, p.system.a.n);
  return p;
}

double unit_cube_first_eigenvalue() { return 3.0 * std::numbers::pi * std::numbers::pi; }

#define DDS_INSTANTIATE(T)                                                                     \
  template MaterialField<T> sphere_material(const HexMesh&, std::array<double, 3>, double, T); \
  template DenseMatrix<T> element_matrices(double, T, double);                                \
  template AssembledSystem<T> assemble(const HexMesh&, const MaterialField<T>&, double);       \
  template DenseMatrix<T> point_source_rhs(std::span<const Index>, std::span<const Index>,     \
                                           Index);                                             \
  template GeneratedProblem<T> array_problem(Index, Index, Index, Index, Index, Index, double); \
  template GeneratedProblem<T> sphere_problem(Index, T, double, Index, std::uint64_t);

DDS_INSTANTIATE(double)
DDS_INSTANTIATE(cdouble)

#undef DDS_INSTANTIATE

}  // namespace dds
