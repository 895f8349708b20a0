#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace dds {

/// Row/column index. Offsets into index arrays use Offset.
using Index = std::int32_t;
using Offset = std::int64_t;
using cdouble = std::complex<double>;

enum class ErrorCode : int {
  kInvalidArgument = 1,
  kParse = 2,
  kIo = 3,
  kDimensionMismatch = 4,
  kInternal = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool cond, ErrorCode code, const char* what) {
  if (!cond) fail(code, what);
}

enum class Field { kReal, kComplex };

template <typename T>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static constexpr Field field = Field::kReal;
  static constexpr bool is_complex = false;
};

template <>
struct ScalarTraits<cdouble> {
  static constexpr Field field = Field::kComplex;
  static constexpr bool is_complex = true;
};

template <typename T>
concept SolverScalar = std::is_same_v<T, double> || std::is_same_v<T, cdouble>;

/// Modulus for complex, absolute value for real.
inline double magnitude(double v) { return v < 0 ? -v : v; }
inline double magnitude(const cdouble& v) { return std::abs(v); }

/// Unit-modulus "sign": v/|v|, or 1 for an exact zero.
inline double unit_sign(double v) { return v < 0 ? -1.0 : 1.0; }
inline cdouble unit_sign(const cdouble& v) {
  double m = std::abs(v);
  return m == 0.0 ? cdouble(1.0, 0.0) : v / m;
}

/// Dense row-major matrix. Used for right-hand sides, solutions and dense
/// blocks of the interface matrix.
template <typename T>
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(Index rows, Index cols)
      : rows_(rows), cols_(cols),
        values_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
    require(rows >= 0 && cols >= 0, ErrorCode::kInvalidArgument,
            "negative matrix dimension");
  }
  DenseMatrix(Index rows, Index cols, std::vector<T> values)
      : rows_(rows), cols_(cols), values_(std::move(values)) {
    require(values_.size() == static_cast<std::size_t>(rows) * cols,
            ErrorCode::kDimensionMismatch, "dense value count != rows*cols");
  }

  static DenseMatrix identity(Index n) {
    DenseMatrix m(n, n);
    for (Index i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  T& operator()(Index r, Index c) noexcept {
    return values_[static_cast<std::size_t>(r) * cols_ + c];
  }
  const T& operator()(Index r, Index c) const noexcept {
    return values_[static_cast<std::size_t>(r) * cols_ + c];
  }

  T* row(Index r) noexcept { return values_.data() + static_cast<std::size_t>(r) * cols_; }
  const T* row(Index r) const noexcept {
    return values_.data() + static_cast<std::size_t>(r) * cols_;
  }

  T* data() noexcept { return values_.data(); }
  const T* data() const noexcept { return values_.data(); }
  std::span<T> values() noexcept { return values_; }
  std::span<const T> values() const noexcept { return values_; }

  /// Columns [c0, c0+width) as a new matrix.
  DenseMatrix column_block(Index c0, Index width) const {
    DenseMatrix out(rows_, width);
    for (Index r = 0; r < rows_; ++r)
      for (Index c = 0; c < width; ++c) out(r, c) = (*this)(r, c0 + c);
    return out;
  }

  DenseMatrix transpose() const {
    DenseMatrix out(cols_, rows_);
    for (Index r = 0; r < rows_; ++r)
      for (Index c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
    return out;
  }

  void fill(const T& v) { std::fill(values_.begin(), values_.end(), v); }

  bool operator==(const DenseMatrix& o) const = default;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<T> values_;
};

/// Max-norm (largest entry modulus) of a dense matrix.
template <typename T>
double max_abs(const DenseMatrix<T>& m) {
  double r = 0.0;
  for (const T& v : m.values()) r = std::max(r, magnitude(v));
  return r;
}

/// Row-sum infinity norm of a dense matrix.
template <typename T>
double norm_inf(const DenseMatrix<T>& m) {
  double r = 0.0;
  for (Index i = 0; i < m.rows(); ++i) {
    double s = 0.0;
    for (Index j = 0; j < m.cols(); ++j) s += magnitude(m(i, j));
    r = std::max(r, s);
  }
  return r;
}

}  // namespace dds
