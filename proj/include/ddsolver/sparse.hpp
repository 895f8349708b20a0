#pragma once

#include <variant>
#include <vector>

#include "ddsolver/common.hpp"

namespace dds {

/// Compressed-column symmetric matrix holding only the lower triangle
/// (row >= col). Row indices are strictly increasing within a column.
template <typename T>
struct SymSparseMatrix {
  Index n = 0;
  std::vector<Offset> colptr{0};
  std::vector<Index> rowidx;
  std::vector<T> values;

  static constexpr Field field = ScalarTraits<T>::field;

  Offset nnz() const noexcept { return colptr.empty() ? 0 : colptr.back(); }

  /// Stored value at (row, col) of the full symmetric matrix, zero if absent.
  T at(Index row, Index col) const;

  /// Throws kInternal if the storage invariants are violated.
  void validate() const;

  bool operator==(const SymSparseMatrix&) const = default;
};

using AnySymMatrix = std::variant<SymSparseMatrix<double>, SymSparseMatrix<cdouble>>;

template <typename T>
struct Triplet {
  Index row;
  Index col;
  T value;
};

/// Builds a lower-triangle matrix from coordinates. Entries above the diagonal
/// are mirrored, duplicates summed.
template <typename T>
SymSparseMatrix<T> from_triplets(Index n, std::span<const Triplet<T>> entries);

/// Sparse rectangular compressed-column matrix (interior-to-interface coupling).
template <typename T>
struct SparseRect {
  Index rows = 0;
  Index cols = 0;
  std::vector<Offset> colptr{0};
  std::vector<Index> rowidx;
  std::vector<T> values;

  Offset nnz() const noexcept { return colptr.empty() ? 0 : colptr.back(); }
};

/// Symmetric adjacency without self loops, stored as sorted neighbor lists.
struct Graph {
  Index n = 0;
  std::vector<Offset> xadj{0};
  std::vector<Index> adj;

  std::span<const Index> neighbors(Index v) const {
    return {adj.data() + xadj[v], static_cast<std::size_t>(xadj[v + 1] - xadj[v])};
  }
  Index degree(Index v) const { return static_cast<Index>(xadj[v + 1] - xadj[v]); }
  Offset edge_count() const { return static_cast<Offset>(adj.size()) / 2; }

  /// Builds from an undirected edge list; duplicates and self loops dropped.
  static Graph from_edges(Index n, std::span<const std::pair<Index, Index>> edges);
};

/// perm maps new index -> old index; inverse maps old -> new.
struct Permutation {
  std::vector<Index> perm;
  std::vector<Index> inverse;

  static Permutation identity(Index n);
  /// Throws kInvalidArgument unless perm is a bijection on [0, n).
  static Permutation from_perm(std::vector<Index> perm);

  Index size() const noexcept { return static_cast<Index>(perm.size()); }
  /// (this ∘ other): new index i maps to old index other.perm[this->perm[i]].
  Permutation compose(const Permutation& other) const;
};

template <typename T>
Graph adjacency_of(const SymSparseMatrix<T>& a);

/// B[i][j] = A[p[i]][p[j]].
template <typename T>
SymSparseMatrix<T> permute_sym(const SymSparseMatrix<T>& a, const Permutation& p);

/// Principal submatrix on the given (old) indices, in the order listed.
template <typename T>
SymSparseMatrix<T> extract_sym(const SymSparseMatrix<T>& a, std::span<const Index> idx);

/// Y = A X with the implied symmetric upper triangle.
template <typename T>
DenseMatrix<T> matvec_sym(const SymSparseMatrix<T>& a, const DenseMatrix<T>& x);

/// Row-sum infinity norm of the full symmetric matrix.
template <typename T>
double norm_inf(const SymSparseMatrix<T>& a);

/// Per column j: ||A x_j - b_j||inf / (||A||inf ||x_j||inf + ||b_j||inf).
template <typename T>
std::vector<double> relative_residual(const SymSparseMatrix<T>& a, const DenseMatrix<T>& x,
                                      const DenseMatrix<T>& b);

template <typename T>
DenseMatrix<T> to_dense(const SymSparseMatrix<T>& a);

}  // namespace dds
