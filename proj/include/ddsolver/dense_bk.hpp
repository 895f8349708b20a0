#pragma once

#include "ddsolver/common.hpp"

namespace dds {

/// Bunch-Kaufman growth constant (1 + sqrt(17)) / 8.
inline constexpr double kBunchKaufmanAlpha = 0.64038820320220756872767623199676;

/// P B P^T = L D L^T with L unit lower and D block diagonal (1x1 and 2x2).
template <typename T>
struct DenseBkFactor {
  std::vector<Index> perm;          // new -> old, local to the block
  DenseMatrix<T> l;                 // unit lower, diagonal stored as 1
  std::vector<T> d_diag;            // D(k,k)
  std::vector<T> d_sub;             // D(k+1,k) for the leading row of a 2x2 pivot, else 0
  std::vector<unsigned char> pivot; // 1: 1x1, 2: leading row of 2x2, 0: trailing row of 2x2
  Index perturbed = 0;

  Index n() const noexcept { return static_cast<Index>(perm.size()); }
  Index two_by_two_count() const;
  DenseMatrix<T> d_matrix() const;

  /// Rows of x (row-major, k columns) multiplied by D^{-1} from the left.
  void apply_d_inverse_rows(DenseMatrix<T>& x) const;
  /// Each row of x (length n) replaced by row * D^{-1}.
  void apply_d_inverse_cols(T* x, Index rows, Index ld) const;
};

/// Unblocked Bunch-Kaufman LDL^T of a symmetric (or complex-symmetric)
/// matrix; only the lower triangle of b is read. Pivot comparisons use the
/// modulus. An exactly zero column gets a perturbed pivot
/// tau * max(||b||inf, 1 if zero) and is counted in `perturbed`.
template <typename T>
DenseBkFactor<T> dense_bk_ldlt(const DenseMatrix<T>& b, double tau = 1e-12);

/// Solves b x = rhs with a dense factor (multi-column, in place).
template <typename T>
void dense_bk_solve(const DenseBkFactor<T>& f, DenseMatrix<T>& rhs);

}  // namespace dds
