#pragma once

#include <array>
#include <cstdint>

#include "ddsolver/sparse.hpp"

namespace dds {

/// Structured hexahedral grid; node id(i,j,k) = i + nx*(j + ny*k).
struct HexMesh {
  Index nx = 0, ny = 0, nz = 0;
  double h = 0.0;

  Index node_count() const noexcept { return nx * ny * nz; }
  Index cell_count() const noexcept { return (nx - 1) * (ny - 1) * (nz - 1); }
  Index node(Index i, Index j, Index k) const noexcept { return i + nx * (j + ny * k); }
  bool on_boundary(Index node) const noexcept;
};

HexMesh build_grid(Index nx, Index ny, Index nz, double h);

/// Relative permittivity per cell.
template <typename T>
struct MaterialField {
  std::vector<T> eps;
};

/// Cells whose centroid lies within `radius` of `center` get eps_in, all
/// others 1. A zero radius gives the uniform background.
template <typename T>
MaterialField<T> sphere_material(const HexMesh& mesh, std::array<double, 3> center,
                                 double radius, T eps_in);

/// E = K - k^2 eps M for one trilinear hexahedron of side h, with K the
/// gradient-gradient stiffness and M the mass matrix, both from 2x2x2
/// Gauss-Legendre quadrature. Local node a = i + 2j + 4k.
template <typename T>
DenseMatrix<T> element_matrices(double h, T eps, double wavenumber);

/// Global system over interior nodes; outer-surface nodes carry zero
/// Dirichlet values and are eliminated.
template <typename T>
struct AssembledSystem {
  SymSparseMatrix<T> a;
  std::vector<Index> interior_of_node;  // node -> interior index, -1 on the boundary
  std::vector<Index> node_of_interior;
};

template <typename T>
AssembledSystem<T> assemble(const HexMesh& mesh, const MaterialField<T>& mat, double wavenumber);

/// One unit column per source node.
template <typename T>
DenseMatrix<T> point_source_rhs(std::span<const Index> interior_of_node,
                                std::span<const Index> source_nodes, Index n_interior);

template <typename T>
struct GeneratedProblem {
  AssembledSystem<T> system;
  DenseMatrix<T> rhs;
};

/// rows x cols array of point sources on the mid-height plane with the
/// given node spacing, centered in an nx x ny x nz uniform medium.
template <typename T>
GeneratedProblem<T> array_problem(Index rows, Index cols, Index spacing, Index nx, Index ny,
                                  Index nz, double wavenumber);

/// Dielectric sphere (radius 0.3, centered) in the unit cube meshed with
/// `nodes` nodes per axis; `rhs_count` point sources at interior nodes drawn
/// from a seeded generator.
template <typename T>
GeneratedProblem<T> sphere_problem(Index nodes, T eps_in, double wavenumber, Index rhs_count,
                                   std::uint64_t seed);

/// Smallest Dirichlet eigenvalue of the Laplacian on the unit cube, 3 pi^2.
double unit_cube_first_eigenvalue();

}  // namespace dds
