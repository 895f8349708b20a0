#pragma once

#include "ddsolver/decompose.hpp"
#include "ddsolver/sparse_ldlt.hpp"

namespace dds {

/// Blocks of A under an arrowhead layout. Interior blocks use part-local
/// indices (layout order); interface indices run over [0, n_b) in group order.
template <typename T>
struct ArrowheadSplit {
  std::vector<SymSparseMatrix<T>> a_ii;
  std::vector<SparseRect<T>> a_ib;  // n_i x n_b
  SymSparseMatrix<T> a_bb;

  std::size_t bytes() const;
};

template <typename T>
ArrowheadSplit<T> split_arrowhead(const SymSparseMatrix<T>& a, const ArrowheadLayout& layout);

/// Inverse of split_arrowhead: the permuted matrix permute_sym(A, layout.perm).
template <typename T>
SymSparseMatrix<T> reassemble_arrowhead(const ArrowheadSplit<T>& s, const ArrowheadLayout& layout);

/// Interface-index view of the grouping: group and signature per interface
/// index, plus each group's offset.
struct InterfaceIndex {
  std::vector<Index> group_of;           // interface index -> group
  std::vector<Index> offset;             // group -> first interface index (G + 1 entries)
  std::vector<std::vector<Index>> signature;  // group -> signature

  static InterfaceIndex from(const ArrowheadLayout& layout,
                            const std::vector<InterfaceGroup>& groups);
  Index n_groups() const { return static_cast<Index>(signature.size()); }
  Index group_size(Index g) const { return offset[g + 1] - offset[g]; }
};

/// Block (row_group, col_group) of one subdomain's additive contribution to
/// the interface matrix, row_group >= col_group, at full group-pair shape.
template <typename T>
struct ContributionBlock {
  Index row_group = 0;
  Index col_group = 0;
  DenseMatrix<T> block;
};

template <typename T>
struct SchurContribution {
  Index part = 0;
  std::vector<Index> footprint;            // interface indices touched, sorted
  std::vector<ContributionBlock<T>> blocks;

  std::size_t bytes() const;
};

/// Column width of the W = A_ii^{-1} A_ib panels.
inline constexpr Index kSchurPanelWidth = 64;

/// S_i = share_i(A_bb) - A_ib^T A_ii^{-1} A_ib scattered into group-pair
/// blocks. The share gives each A_bb entry (r, c) to every part in
/// sig(r) ∩ sig(c) with weight 1/|sig(r) ∩ sig(c)|. `workspace_bytes` (if
/// given) receives the peak transient bytes used.
template <typename T>
SchurContribution<T> schur_contribution(Index part, const SparseLdlt<T>& f,
                                        const SparseRect<T>& a_ib,
                                        const SymSparseMatrix<T>& a_bb,
                                        const InterfaceIndex& ifx,
                                        std::size_t* workspace_bytes = nullptr);

/// Dense footprint form of S_i before scattering (rows/cols = footprint);
/// exposed for symmetry checks.
template <typename T>
DenseMatrix<T> schur_footprint_dense(Index part, const SparseLdlt<T>& f,
                                     const SparseRect<T>& a_ib, const SymSparseMatrix<T>& a_bb,
                                     const InterfaceIndex& ifx, std::vector<Index>& footprint,
                                     std::size_t* workspace_bytes = nullptr);

/// y -= A_ib^T x   (y: n_b x k, x: n_i x k)
template <typename T>
void subtract_transpose_product(const SparseRect<T>& a_ib, const DenseMatrix<T>& x,
                                DenseMatrix<T>& y);

/// x_i = A_ii^{-1} (b_i - A_ib x_b), x_b over the whole interface.
template <typename T>
DenseMatrix<T> interior_recover(const SparseLdlt<T>& f, const SparseRect<T>& a_ib,
                                const DenseMatrix<T>& x_b, const DenseMatrix<T>& b_i);

}  // namespace dds
