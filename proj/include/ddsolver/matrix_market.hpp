#pragma once

#include <iosfwd>
#include <string>
#include <variant>

#include "ddsolver/sparse.hpp"

namespace dds {

/// Reads a `coordinate ... symmetric` Matrix Market stream (real or complex).
/// Parse errors carry the offending line number.
AnySymMatrix load_matrix_market(std::istream& in);
AnySymMatrix load_matrix_market_file(const std::string& path);

/// Writes with shortest round-trip decimal formatting, so load(save(A)) == A.
template <typename T>
void save_matrix_market(const SymSparseMatrix<T>& a, std::ostream& out);
template <typename T>
void save_matrix_market_file(const SymSparseMatrix<T>& a, const std::string& path);

using AnyDense = std::variant<DenseMatrix<double>, DenseMatrix<cdouble>>;

/// Dense `array ... general` format (column-major listing), used for
/// right-hand sides and solutions.
AnyDense load_dense_matrix_market(std::istream& in);
AnyDense load_dense_matrix_market_file(const std::string& path);
template <typename T>
void save_dense_matrix_market(const DenseMatrix<T>& m, std::ostream& out);
template <typename T>
void save_dense_matrix_market_file(const DenseMatrix<T>& m, const std::string& path);

}  // namespace dds
