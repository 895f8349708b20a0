#pragma once

#include "ddsolver/amd.hpp"
#include "ddsolver/sparse.hpp"

namespace dds {

/// Pivots smaller than kPivotTau * ||A||inf are replaced by
/// unit_sign(d) * kPivotTau * ||A||inf and flagged.
inline constexpr double kPivotTau = 1e-12;

/// Sparse LDL^T factor with 1x1 pivots: P A P^T = L D L^T, L unit lower
/// (strict part stored column-wise), D diagonal.
template <typename T>
struct SparseLdlt {
  Permutation perm;              // fill-reducing order, new -> old
  std::vector<Index> etree;      // parent in the elimination tree, -1 for roots
  std::vector<Offset> colptr;    // strict lower part of L
  std::vector<Index> rowidx;
  std::vector<T> lvalues;
  std::vector<T> d;
  std::vector<unsigned char> perturbed;
  double anorm = 0.0;

  Index n() const noexcept { return perm.size(); }
  Offset nnz_l() const noexcept { return colptr.empty() ? 0 : colptr.back(); }
  Index perturbation_count() const;
  /// Accounted bytes: scalars of L and D plus index arrays.
  std::size_t bytes() const;
};

/// Factorizes A under the given ordering (AMD when omitted). Left-looking
/// numeric phase over a symbolic pattern precomputed from the elimination
/// tree. Always completes; tiny pivots are perturbed and flagged.
template <typename T>
SparseLdlt<T> sparse_ldlt(const SymSparseMatrix<T>& a, const OrderingFn& order = {});

/// Same, but with an explicit permutation (identity for natural order).
template <typename T>
SparseLdlt<T> sparse_ldlt_with(const SymSparseMatrix<T>& a, Permutation perm);

/// X = A^{-1} B through permute, forward, diagonal, backward, unpermute.
template <typename T>
DenseMatrix<T> solve_factored(const SparseLdlt<T>& f, const DenseMatrix<T>& rhs);

/// In-place variant operating on a row-major block whose rows are in the
/// factor's original (unpermuted) index space.
template <typename T>
void solve_factored_inplace(const SparseLdlt<T>& f, DenseMatrix<T>& x);

/// Elimination tree of a lower-stored symmetric matrix.
template <typename T>
std::vector<Index> elimination_tree(const SymSparseMatrix<T>& a);

}  // namespace dds
