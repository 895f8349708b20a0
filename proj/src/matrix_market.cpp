#include "ddsolver/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace dds {
namespace {

struct LineReader {
  std::istream& in;
  long line_no = 0;

  bool next(std::string& line) {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return true;
    }
    return false;
  }

  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorCode::kParse, "line " + std::to_string(line_no) + ": " + what);
  }
};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

struct Header {
  std::string format;    // coordinate | array
  std::string field;     // real | complex
  std::string symmetry;  // symmetric | general
};

Header read_header(LineReader& r) {
  std::string line;
  if (!r.next(line)) r.error("empty stream");
  std::istringstream hs(line);
  std::string banner, object, format, field, symmetry;
  hs >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket") r.error("missing %%MatrixMarket banner");
  if (lower(object) != "matrix") r.error("object must be 'matrix'");
  Header h{lower(format), lower(field), lower(symmetry)};
  if (h.format != "coordinate" && h.format != "array") r.error("unknown format '" + format + "'");
  if (h.field != "real" && h.field != "complex") r.error("unsupported field '" + field + "'");
  return h;
}

// Skips comments and blank lines, returns the first data line.
bool next_data(LineReader& r, std::string& line) {
  while (r.next(line)) {
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '%') continue;
    return true;
  }
  return false;
}

class Tokens {
 public:
  Tokens(const std::string& s, const LineReader& r) : s_(s), r_(r) {}

  template <typename V>
  V get(const char* what) {
    skip();
    V v{};
    auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
    if (ec != std::errc()) r_.error(std::string("cannot parse ") + what);
    pos_ = static_cast<std::size_t>(ptr - s_.data());
    return v;
  }

  bool done() {
    skip();
    return pos_ == s_.size();
  }

 private:
  void skip() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }
  const std::string& s_;
  const LineReader& r_;
  std::size_t pos_ = 0;
};

template <typename T>
T read_value(Tokens& t) {
  if constexpr (ScalarTraits<T>::is_complex) {
    double re = t.get<double>("real part");
    double im = t.get<double>("imaginary part");
    return T(re, im);
  } else {
    return t.get<double>("value");
  }
}

template <typename T>
SymSparseMatrix<T> read_coordinate(LineReader& r, long rows, long cols, long entries) {
  std::vector<Triplet<T>> trips;
  trips.reserve(static_cast<std::size_t>(entries));
  std::string line;
  for (long k = 0; k < entries; ++k) {
    if (!next_data(r, line)) r.error("unexpected end of stream, expected " +
                                     std::to_string(entries) + " entries");
    Tokens t(line, r);
    long i = t.get<long>("row index");
    long j = t.get<long>("column index");
    if (i < 1 || i > rows || j < 1 || j > cols) r.error("index out of range");
    T v = read_value<T>(t);
    if (!t.done()) r.error("trailing characters");
    trips.push_back({static_cast<Index>(i - 1), static_cast<Index>(j - 1), v});
  }
  return from_triplets<T>(static_cast<Index>(rows), trips);
}

template <typename T>
DenseMatrix<T> read_array(LineReader& r, long rows, long cols) {
  DenseMatrix<T> m(static_cast<Index>(rows), static_cast<Index>(cols));
  std::string line;
  for (long c = 0; c < cols; ++c)
    for (long i = 0; i < rows; ++i) {
      if (!next_data(r, line)) r.error("unexpected end of array data");
      Tokens t(line, r);
      m(static_cast<Index>(i), static_cast<Index>(c)) = read_value<T>(t);
      if (!t.done()) r.error("trailing characters");
    }
  return m;
}

void write_double(std::ostream& out, double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.write(buf, ptr - buf);
}

template <typename T>
void write_value(std::ostream& out, const T& v) {
  if constexpr (ScalarTraits<T>::is_complex) {
    write_double(out, v.real());
    out << ' ';
    write_double(out, v.imag());
  } else {
    write_double(out, v);
  }
}

const char* field_name(Field f) { return f == Field::kComplex ? "complex" : "real"; }

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

AnySymMatrix load_matrix_market(std::istream& in) {
  LineReader r{in};
  Header h = read_header(r);
  if (h.format != "coordinate") r.error("expected coordinate format");
  if (h.symmetry != "symmetric") r.error("matrix kind must be 'symmetric', got '" + h.symmetry + "'");
  std::string line;
  if (!next_data(r, line)) r.error("missing size line");
  Tokens t(line, r);
  long rows = t.get<long>("row count");
  long cols = t.get<long>("column count");
  long entries = t.get<long>("entry count");
  if (!t.done()) r.error("trailing characters in size line");
  if (rows != cols) r.error("matrix is not square");
  if (rows < 0 || entries < 0) r.error("negative size");
  if (h.field == "complex") return read_coordinate<cdouble>(r, rows, cols, entries);
  return read_coordinate<double>(r, rows, cols, entries);
}

AnySymMatrix load_matrix_market_file(const std::string& path) {
  auto in = open_in(path);
  return load_matrix_market(in);
}

template <typename T>
void save_matrix_market(const SymSparseMatrix<T>& a, std::ostream& out) {
  out << "%%MatrixMarket matrix coordinate " << field_name(SymSparseMatrix<T>::field)
      << " symmetric\n";
  out << a.n << ' ' << a.n << ' ' << a.nnz() << '\n';
  for (Index j = 0; j < a.n; ++j)
    for (Offset p = a.colptr[j]; p < a.colptr[j + 1]; ++p) {
      out << a.rowidx[p] + 1 << ' ' << j + 1 << ' ';
      write_value(out, a.values[p]);
      out << '\n';
    }
  if (!out) fail(ErrorCode::kIo, "write failure");
}

template <typename T>
void save_matrix_market_file(const SymSparseMatrix<T>& a, const std::string& path) {
  auto out = open_out(path);
  save_matrix_market(a, out);
}

AnyDense load_dense_matrix_market(std::istream& in) {
  LineReader r{in};
  Header h = read_header(r);
  if (h.format != "array") r.error("expected array format");
  if (h.symmetry != "general") r.error("dense arrays must be 'general'");
  std::string line;
  if (!next_data(r, line)) r.error("missing size line");
  Tokens t(line, r);
  long rows = t.get<long>("row count");
  long cols = t.get<long>("column count");
  if (!t.done()) r.error("trailing characters in size line");
  if (rows < 0 || cols < 0) r.error("negative size");
  if (h.field == "complex") return read_array<cdouble>(r, rows, cols);
  return read_array<double>(r, rows, cols);
}

AnyDense load_dense_matrix_market_file(const std::string& path) {
  auto in = open_in(path);
  return load_dense_matrix_market(in);
}

template <typename T>
void save_dense_matrix_market(const DenseMatrix<T>& m, std::ostream& out) {
  out << "%%MatrixMarket matrix array " << field_name(ScalarTraits<T>::field) << " general\n";
  out << m.rows() << ' ' << m.cols() << '\n';
  for (Index c = 0; c < m.cols(); ++c)
    for (Index i = 0; i < m.rows(); ++i) {
      write_value(out, m(i, c));
      out << '\n';
    }
  if (!out) fail(ErrorCode::kIo, "write failure");
}

template <typename T>
void save_dense_matrix_market_file(const DenseMatrix<T>& m, const std::string& path) {
  auto out = open_out(path);
  save_dense_matrix_market(m, out);
}

template void save_matrix_market(const SymSparseMatrix<double>&, std::ostream&);
template void save_matrix_market(const SymSparseMatrix<cdouble>&, std::ostream&);
template void save_matrix_market_file(const SymSparseMatrix<double>&, const std::string&);
template void save_matrix_market_file(const SymSparseMatrix<cdouble>&, const std::string&);
template void save_dense_matrix_market(const DenseMatrix<double>&, std::ostream&);
template void save_dense_matrix_market(const DenseMatrix<cdouble>&, std::ostream&);
template void save_dense_matrix_market_file(const DenseMatrix<double>&, const std::string&);
template void save_dense_matrix_market_file(const DenseMatrix<cdouble>&, const std::string&);

}  // namespace dds
