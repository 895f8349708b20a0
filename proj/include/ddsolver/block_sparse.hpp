#pragma once

#include <iosfwd>
#include <map>

#include "ddsolver/dense_bk.hpp"
#include "ddsolver/subdomain.hpp"

namespace dds {

/// Symmetric matrix made of dense group-pair blocks. Only blocks with
/// row_group >= col_group are stored; diagonal blocks are always present.
template <typename T>
class BlockSparseSym {
 public:
  BlockSparseSym() = default;
  explicit BlockSparseSym(std::vector<Index> group_sizes);

  /// Blocks holding any nonzero of a (diagonal blocks always).
  static BlockSparseSym from_dense(const DenseMatrix<T>& a, std::vector<Index> group_sizes);

  Index n() const { return offsets_.empty() ? 0 : offsets_.back(); }
  Index n_groups() const { return static_cast<Index>(sizes_.size()); }
  Index group_size(Index g) const { return sizes_[g]; }
  Index group_offset(Index g) const { return offsets_[g]; }
  const std::vector<Index>& group_sizes() const { return sizes_; }

  bool has(Index r, Index c) const;
  /// Adds a zero block if absent; returns it.
  DenseMatrix<T>& insert(Index r, Index c);
  /// Throws kInternal when the block is not allocated.
  DenseMatrix<T>& block(Index r, Index c);
  const DenseMatrix<T>& block(Index r, Index c) const;
  /// Stored blocks of column group c, keyed by row group (>= c).
  const std::map<Index, DenseMatrix<T>>& column(Index c) const { return cols_[c]; }
  std::map<Index, DenseMatrix<T>>& column(Index c) { return cols_[c]; }

  std::size_t block_count() const;
  /// Scalars and index bookkeeping of all stored blocks.
  std::size_t bytes() const;
  /// Makes every diagonal block exactly symmetric.
  void symmetrize();
  DenseMatrix<T> expand_dense() const;
  void dump(std::ostream& out) const;

 private:
  std::vector<Index> sizes_;
  std::vector<Index> offsets_{0};
  std::vector<std::map<Index, DenseMatrix<T>>> cols_;
};

/// Adds one contribution into s; returns the bytes of newly created blocks.
template <typename T>
std::size_t accumulate_contribution(BlockSparseSym<T>& s, const SchurContribution<T>& c);

/// Sums the contributions in ascending part order, then symmetrizes.
/// Contributions must come from distinct parts.
template <typename T>
BlockSparseSym<T> assemble_interface(std::vector<SchurContribution<T>> contributions,
                                     const InterfaceIndex& ifx);

struct BlockSymbolic {
  std::vector<Index> order;                    // step -> group
  std::vector<Index> position;                 // group -> step
  std::vector<std::vector<Index>> below;       // per group: later-eliminated neighbors, by step
  std::vector<std::pair<Index, Index>> fill;   // created pairs (row >= col by group id)

  Index n_groups() const { return static_cast<Index>(order.size()); }
};

enum class BlockOrdering {
  kWeightedDegree,  // degree = total size of the adjacent groups
  kCountDegree,     // degree = number of adjacent groups
};

/// Minimum-degree elimination on the group graph (ties to the lowest group
/// id) with clique completion.
template <typename T>
BlockSymbolic block_symbolic(const BlockSparseSym<T>& s,
                             BlockOrdering ordering = BlockOrdering::kWeightedDegree);

/// Same clique completion under a fixed elimination order.
template <typename T>
BlockSymbolic block_symbolic_with_order(const BlockSparseSym<T>& s, std::vector<Index> order);

template <typename T>
struct BlockLDLFactor {
  std::vector<Index> sizes;
  std::vector<Index> offsets;
  std::vector<Index> order;
  std::vector<Index> position;
  std::vector<DenseBkFactor<T>> diag;  // per group
  /// Per group j: (i, L_ij) for later groups i, L_ij rows in group i's
  /// original order, columns in j's pivoted order.
  std::vector<std::vector<std::pair<Index, DenseMatrix<T>>>> lower;
  Index perturbed = 0;
  std::size_t peak_bytes = 0;  // live working + factor bytes during elimination

  Index n() const { return offsets.empty() ? 0 : offsets.back(); }
  Index n_groups() const { return static_cast<Index>(sizes.size()); }
  std::size_t bytes() const;
  Index two_by_two_count() const;
  /// Global permutation (new -> old) of interface indices.
  Permutation permutation() const;
  /// Dense unit-lower L and block-diagonal D with P S P^T = L D L^T.
  DenseMatrix<T> l_dense() const;
  DenseMatrix<T> d_dense() const;
};

/// Right-looking block LDL^T. Consumes s (blocks are released as their
/// columns are factored). Writing to a block the symbolic phase did not
/// allocate throws kInternal.
template <typename T>
BlockLDLFactor<T> block_numeric(BlockSparseSym<T> s, const BlockSymbolic& sym);

/// X = S^{-1} B for an n_b x k block.
template <typename T>
DenseMatrix<T> block_solve(const BlockLDLFactor<T>& f, const DenseMatrix<T>& rhs);

}  // namespace dds
