#pragma once

#include <string>

#include "ddsolver/block_sparse.hpp"
#include "ddsolver/decompose.hpp"
#include "ddsolver/sparse_ldlt.hpp"
#include "ddsolver/subdomain.hpp"

namespace dds {

struct PhaseStat {
  std::string name;
  double seconds = 0.0;
  std::size_t peak_bytes = 0;
};

struct SolveStats {
  Index n = 0;
  Offset nnz = 0;
  Index n_parts = 1;
  Index n_interface = 0;
  Index n_groups = 0;
  Index perturbations = 0;
  std::vector<PhaseStat> phases;
  std::size_t peak_bytes = 0;
  std::vector<double> residuals;

  double seconds(const std::string& phase) const;
  double total_seconds() const;
};

template <typename T>
struct DDFactor {
  Index n = 0;
  ArrowheadLayout layout;
  std::vector<SparseLdlt<T>> interior;
  std::vector<SparseRect<T>> a_ib;
  BlockLDLFactor<T> interface;
  std::size_t bytes = 0;  // accounted bytes retained for solves
  std::size_t fill_blocks = 0;
  std::string interface_summary;  // block structure of the assembled interface
  SolveStats stats;
};

template <typename T>
struct BaselineFactor {
  SparseLdlt<T> factor;
  std::size_t bytes = 0;
  SolveStats stats;
};

/// round(sqrt(n) / 8) clamped to [2, 64] (and to n).
Index default_parts(Index n);

/// Partition, split, per-part factor and Schur contribution, interface
/// assembly, block symbolic and numeric factorization. `threads` parts run
/// concurrently; results do not depend on it.
template <typename T>
DDFactor<T> dd_factor(const SymSparseMatrix<T>& a, Index n_parts, int threads = 1);

/// Condense, interface solve, interior recovery. Residuals are left empty.
template <typename T>
DenseMatrix<T> dd_solve(const DDFactor<T>& f, const DenseMatrix<T>& b, SolveStats* stats = nullptr,
                        int threads = 1);

/// AMD-ordered sparse LDL^T of the whole matrix.
template <typename T>
BaselineFactor<T> baseline_factor(const SymSparseMatrix<T>& a);

template <typename T>
DenseMatrix<T> baseline_solve(const BaselineFactor<T>& f, const DenseMatrix<T>& b,
                              SolveStats* stats = nullptr);

}  // namespace dds
