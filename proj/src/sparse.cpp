#include "ddsolver/sparse.hpp"

#include <algorithm>
#include <numeric>

namespace dds {

template <typename T>
T SymSparseMatrix<T>::at(Index row, Index col) const {
  if (row < col) std::swap(row, col);
  auto first = rowidx.begin() + colptr[col];
  auto last = rowidx.begin() + colptr[col + 1];
  auto it = std::lower_bound(first, last, row);
  if (it == last || *it != row) return T(0);
  return values[static_cast<std::size_t>(it - rowidx.begin())];
}

template <typename T>
void SymSparseMatrix<T>::validate() const {
  require(n >= 0, ErrorCode::kInternal, "negative dimension");
  require(colptr.size() == static_cast<std::size_t>(n) + 1, ErrorCode::kInternal,
          "colptr length != n+1");
  require(colptr[0] == 0, ErrorCode::kInternal, "colptr[0] != 0");
  require(rowidx.size() == static_cast<std::size_t>(nnz()) && values.size() == rowidx.size(),
          ErrorCode::kInternal, "index/value arrays disagree with colptr[n]");
  for (Index j = 0; j < n; ++j) {
    require(colptr[j] <= colptr[j + 1], ErrorCode::kInternal, "colptr decreasing");
    for (Offset p = colptr[j]; p < colptr[j + 1]; ++p) {
      require(rowidx[p] >= j && rowidx[p] < n, ErrorCode::kInternal,
              "row index outside lower triangle");
      require(p == colptr[j] || rowidx[p - 1] < rowidx[p], ErrorCode::kInternal,
              "row indices not strictly increasing");
    }
  }
}

namespace {

// Counting sort by column, then by row within each column; duplicates summed.
template <typename T>
SymSparseMatrix<T> compress(Index n, std::vector<Index>& rows, std::vector<Index>& cols,
                            std::vector<T>& vals) {
  const std::size_t m = rows.size();
  std::vector<Offset> count(static_cast<std::size_t>(n) + 1, 0);
  for (std::size_t k = 0; k < m; ++k) ++count[rows[k] + 1];
  std::partial_sum(count.begin(), count.end(), count.begin());
  // First pass: bucket by row, keeping column order stable.
  std::vector<Index> c1(m);
  std::vector<T> v1(m);
  std::vector<Index> r1(m);
  {
    std::vector<Offset> next(count.begin(), count.end() - 1);
    for (std::size_t k = 0; k < m; ++k) {
      Offset p = next[rows[k]]++;
      r1[p] = rows[k];
      c1[p] = cols[k];
      v1[p] = vals[k];
    }
  }
  // Second pass: bucket by column; rows come out sorted.
  std::fill(count.begin(), count.end(), 0);
  for (std::size_t k = 0; k < m; ++k) ++count[c1[k] + 1];
  std::partial_sum(count.begin(), count.end(), count.begin());
  std::vector<Index> r2(m);
  std::vector<T> v2(m);
  {
    std::vector<Offset> next(count.begin(), count.end() - 1);
    for (std::size_t k = 0; k < m; ++k) {
      Offset p = next[c1[k]]++;
      r2[p] = r1[k];
      v2[p] = v1[k];
    }
  }
  SymSparseMatrix<T> out;
  out.n = n;
  out.colptr.assign(static_cast<std::size_t>(n) + 1, 0);
  out.rowidx.reserve(m);
  out.values.reserve(m);
  for (Index j = 0; j < n; ++j) {
    for (Offset p = count[j]; p < count[j + 1]; ++p) {
      if (static_cast<Offset>(out.rowidx.size()) > out.colptr[j] && out.rowidx.back() == r2[p]) {
        out.values.back() += v2[p];
      } else {
        out.rowidx.push_back(r2[p]);
        out.values.push_back(v2[p]);
      }
    }
    out.colptr[j + 1] = static_cast<Offset>(out.rowidx.size());
  }
  return out;
}

}  // namespace

template <typename T>
SymSparseMatrix<T> from_triplets(Index n, std::span<const Triplet<T>> entries) {
  require(n >= 0, ErrorCode::kInvalidArgument, "negative dimension");
  std::vector<Index> rows, cols;
  std::vector<T> vals;
  rows.reserve(entries.size());
  cols.reserve(entries.size());
  vals.reserve(entries.size());
  for (const auto& e : entries) {
    require(e.row >= 0 && e.row < n && e.col >= 0 && e.col < n, ErrorCode::kInvalidArgument,
            "triplet index out of range");
    rows.push_back(std::max(e.row, e.col));
    cols.push_back(std::min(e.row, e.col));
    vals.push_back(e.value);
  }
  return compress(n, rows, cols, vals);
}

Graph Graph::from_edges(Index n, std::span<const std::pair<Index, Index>> edges) {
  std::vector<std::vector<Index>> lists(static_cast<std::size_t>(n));
  for (auto [u, v] : edges) {
    require(u >= 0 && u < n && v >= 0 && v < n, ErrorCode::kInvalidArgument,
            "edge endpoint out of range");
    if (u == v) continue;
    lists[u].push_back(v);
    lists[v].push_back(u);
  }
  Graph g;
  g.n = n;
  g.xadj.assign(static_cast<std::size_t>(n) + 1, 0);
  for (Index v = 0; v < n; ++v) {
    auto& l = lists[v];
    std::sort(l.begin(), l.end());
    l.erase(std::unique(l.begin(), l.end()), l.end());
    g.adj.insert(g.adj.end(), l.begin(), l.end());
    g.xadj[v + 1] = static_cast<Offset>(g.adj.size());
  }
  return g;
}

Permutation Permutation::identity(Index n) {
  Permutation p;
  p.perm.resize(n);
  std::iota(p.perm.begin(), p.perm.end(), 0);
  p.inverse = p.perm;
  return p;
}

Permutation Permutation::from_perm(std::vector<Index> perm) {
  const Index n = static_cast<Index>(perm.size());
  Permutation p;
  p.inverse.assign(n, -1);
  for (Index i = 0; i < n; ++i) {
    require(perm[i] >= 0 && perm[i] < n && p.inverse[perm[i]] < 0, ErrorCode::kInvalidArgument,
            "not a permutation");
    p.inverse[perm[i]] = i;
  }
  p.perm = std::move(perm);
  return p;
}

Permutation Permutation::compose(const Permutation& other) const {
  require(size() == other.size(), ErrorCode::kDimensionMismatch, "permutation size mismatch");
  std::vector<Index> out(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) out[i] = other.perm[perm[i]];
  return from_perm(std::move(out));
}

template <typename T>
Graph adjacency_of(const SymSparseMatrix<T>& a) {
  std::vector<Offset> deg(static_cast<std::size_t>(a.n) + 1, 0);
  for (Index j = 0; j < a.n; ++j)
    for (Offset p = a.colptr[j]; p < a.colptr[j + 1]; ++p)
      if (a.rowidx[p] != j) {
        ++deg[j + 1];
        ++deg[a.rowidx[p] + 1];
      }
  Graph g;
  g.n = a.n;
  g.xadj.assign(deg.size(), 0);
  std::partial_sum(deg.begin(), deg.end(), g.xadj.begin());
  g.adj.resize(static_cast<std::size_t>(g.xadj.back()));
  std::vector<Offset> next(g.xadj.begin(), g.xadj.end() - 1);
  // Columns visited in ascending order: upper neighbors (i < j) arrive before
  // lower ones, and each group is itself ascending.
  for (Index j = 0; j < a.n; ++j)
    for (Offset p = a.colptr[j]; p < a.colptr[j + 1]; ++p) {
      Index i = a.rowidx[p];
      if (i == j) continue;
      g.adj[next[i]++] = j;
    }
  for (Index j = 0; j < a.n; ++j)
    for (Offset p = a.colptr[j]; p < a.colptr[j + 1]; ++p) {
      Index i = a.rowidx[p];
      if (i == j) continue;
      g.adj[next[j]++] = i;
    }
  return g;
}

template <typename T>
SymSparseMatrix<T> permute_sym(const SymSparseMatrix<T>& a, const Permutation& p) {
  require(p.size() == a.n, ErrorCode::kDimensionMismatch, "permutation size mismatch");
  const std::size_t m = a.rowidx.size();
  std::vector<Index> rows(m), cols(m);
  std::vector<T> vals(a.values);
  for (Index j = 0; j < a.n; ++j)
    for (Offset k = a.colptr[j]; k < a.colptr[j + 1]; ++k) {
      Index r = p.inverse[a.rowidx[k]];
      Index c = p.inverse[j];
      rows[k] = std::max(r, c);
      cols[k] = std::min(r, c);
    }
  return compress(a.n, rows, cols, vals);
}

template <typename T>
SymSparseMatrix<T> extract_sym(const SymSparseMatrix<T>& a, std::span<const Index> idx) {
  std::vector<Index> local(static_cast<std::size_t>(a.n), -1);
  for (std::size_t k = 0; k < idx.size(); ++k) local[idx[k]] = static_cast<Index>(k);
  std::vector<Index> rows, cols;
  std::vector<T> vals;
  for (Index j : idx)
    for (Offset p = a.colptr[j]; p < a.colptr[j + 1]; ++p) {
      Index li = local[a.rowidx[p]];
      if (li < 0) continue;
      Index lj = local[j];
      rows.push_back(std::max(li, lj));
      cols.push_back(std::min(li, lj));
      vals.push_back(a.values[p]);
    }
  return compress(static_cast<Index>(idx.size()), rows, cols, vals);
}

template <typename T>
DenseMatrix<T> matvec_sym(const SymSparseMatrix<T>& a, const DenseMatrix<T>& x) {
  require(x.rows() == a.n, ErrorCode::kDimensionMismatch, "matvec: X rows != n");
  const Index k = x.cols();
  DenseMatrix<T> y(a.n, k);
  for (Index j = 0; j < a.n; ++j) {
    const T* xj = x.row(j);
    T* yj = y.row(j);
    for (Offset p = a.colptr[j]; p < a.colptr[j + 1]; ++p) {
      const Index i = a.rowidx[p];
      const T v = a.values[p];
      T* yi = y.row(i);
      for (Index c = 0; c < k; ++c) yi[c] += v * xj[c];
      if (i != j) {
        const T* xi = x.row(i);
        for (Index c = 0; c < k; ++c) yj[c] += v * xi[c];
      }
    }
  }
  return y;
}

template <typename T>
double norm_inf(const SymSparseMatrix<T>& a) {
  std::vector<double> rowsum(static_cast<std::size_t>(a.n), 0.0);
  for (Index j = 0; j < a.n; ++j)
    for (Offset p = a.colptr[j]; p < a.colptr[j + 1]; ++p) {
      double m = magnitude(a.values[p]);
      rowsum[a.rowidx[p]] += m;
      if (a.rowidx[p] != j) rowsum[j] += m;
    }
  double r = 0.0;
  for (double s : rowsum) r = std::max(r, s);
  return r;
}

template <typename T>
std::vector<double> relative_residual(const SymSparseMatrix<T>& a, const DenseMatrix<T>& x,
                                      const DenseMatrix<T>& b) {
  require(x.rows() == a.n && b.rows() == a.n && x.cols() == b.cols(),
          ErrorCode::kDimensionMismatch, "residual: shape mismatch");
  const DenseMatrix<T> ax = matvec_sym(a, x);
  const double anorm = norm_inf(a);
  const Index k = x.cols();
  std::vector<double> rnorm(k, 0.0), xnorm(k, 0.0), bnorm(k, 0.0);
  for (Index i = 0; i < a.n; ++i)
    for (Index c = 0; c < k; ++c) {
      rnorm[c] = std::max(rnorm[c], magnitude(ax(i, c) - b(i, c)));
      xnorm[c] = std::max(xnorm[c], magnitude(x(i, c)));
      bnorm[c] = std::max(bnorm[c], magnitude(b(i, c)));
    }
  std::vector<double> out(k, 0.0);
  for (Index c = 0; c < k; ++c) {
    double denom = anorm * xnorm[c] + bnorm[c];
    out[c] = denom == 0.0 ? 0.0 : rnorm[c] / denom;
  }
  return out;
}

template <typename T>
DenseMatrix<T> to_dense(const SymSparseMatrix<T>& a) {
  DenseMatrix<T> d(a.n, a.n);
  for (Index j = 0; j < a.n; ++j)
    for (Offset p = a.colptr[j]; p < a.colptr[j + 1]; ++p) {
      d(a.rowidx[p], j) = a.values[p];
      d(j, a.rowidx[p]) = a.values[p];
    }
  return d;
}

#define DDS_INSTANTIATE(T)                                                                    \
  template struct SymSparseMatrix<T>;                                                         \
  template SymSparseMatrix<T> from_triplets(Index, std::span<const Triplet<T>>);              \
  template Graph adjacency_of(const SymSparseMatrix<T>&);                                     \
  template SymSparseMatrix<T> permute_sym(const SymSparseMatrix<T>&, const Permutation&);     \
  template SymSparseMatrix<T> extract_sym(const SymSparseMatrix<T>&, std::span<const Index>); \
  template DenseMatrix<T> matvec_sym(const SymSparseMatrix<T>&, const DenseMatrix<T>&);       \
  template double norm_inf(const SymSparseMatrix<T>&);                                        \
  template std::vector<double> relative_residual(const SymSparseMatrix<T>&,                   \
                                                 const DenseMatrix<T>&, const DenseMatrix<T>&); \
  template DenseMatrix<T> to_dense(const SymSparseMatrix<T>&);

DDS_INSTANTIATE(double)
DDS_INSTANTIATE(cdouble)

#undef DDS_INSTANTIATE

}  // namespace dds
