#include "ddsolver/sparse_ldlt.hpp"

#include <algorithm>

namespace dds {
namespace {

// Upper-triangle pattern (row-wise view of the lower storage): for each k,
// the columns j < k with A(k, j) stored.
struct RowPattern {
  std::vector<Offset> ptr;
  std::vector<Index> col;
  std::vector<Offset> src;  // position of the entry in the lower storage
};

template <typename T>
RowPattern row_pattern(const SymSparseMatrix<T>& a) {
  RowPattern r;
  r.ptr.assign(static_cast<std::size_t>(a.n) + 1, 0);
  for (Index j = 0; j < a.n; ++j)
    for (Offset p = a.colptr[j]; p < a.colptr[j + 1]; ++p)
      if (a.rowidx[p] != j) ++r.ptr[a.rowidx[p] + 1];
  for (Index k = 0; k < a.n; ++k) r.ptr[k + 1] += r.ptr[k];
  r.col.resize(static_cast<std::size_t>(r.ptr.back()));
  r.src.resize(r.col.size());
  std::vector<Offset> next(r.ptr.begin(), r.ptr.end() - 1);
  for (Index j = 0; j < a.n; ++j)
    for (Offset p = a.colptr[j]; p < a.colptr[j + 1]; ++p) {
      Index i = a.rowidx[p];
      if (i == j) continue;
      r.col[next[i]] = j;
      r.src[next[i]++] = p;
    }
  return r;
}

std::vector<Index> etree_from_rows(Index n, const RowPattern& r) {
  std::vector<Index> parent(n, -1), ancestor(n, -1);
  for (Index k = 0; k < n; ++k)
    for (Offset p = r.ptr[k]; p < r.ptr[k + 1]; ++p) {
      Index i = r.col[p];
      while (i != -1 && i < k) {
        Index next = ancestor[i];
        ancestor[i] = k;
        if (next == -1) parent[i] = k;
        i = next;
      }
    }
  return parent;
}

// Nonzero pattern of row k of L (columns < k), via the row subtree of the
// elimination tree. Output is in topological order, written to stack[top..n).
Index ereach(Index k, const RowPattern& r, const std::vector<Index>& parent,
             std::vector<Index>& flag, std::vector<Index>& stack, Index n) {
  Index top = n;
  flag[k] = k;
  for (Offset p = r.ptr[k]; p < r.ptr[k + 1]; ++p) {
    Index i = r.col[p];
    Index len = 0;
    for (; flag[i] != k; i = parent[i]) {
      stack[len++] = i;
      flag[i] = k;
    }
    while (len > 0) stack[--top] = stack[--len];
  }
  return top;
}

}  // namespace

template <typename T>
Index SparseLdlt<T>::perturbation_count() const {
  Index c = 0;
  for (unsigned char f : perturbed) c += f;
  return c;
}

template <typename T>
std::size_t SparseLdlt<T>::bytes() const {
  return sizeof(T) * (lvalues.size() + d.size()) +
         sizeof(Index) * (rowidx.size() + 2 * perm.perm.size() + etree.size()) +
         sizeof(Offset) * colptr.size();
}

template <typename T>
std::vector<Index> elimination_tree(const SymSparseMatrix<T>& a) {
  return etree_from_rows(a.n, row_pattern(a));
}

template <typename T>
SparseLdlt<T> sparse_ldlt_with(const SymSparseMatrix<T>& a, Permutation perm) {
  require(perm.size() == a.n, ErrorCode::kDimensionMismatch, "ordering size mismatch");
  const Index n = a.n;
  const SymSparseMatrix<T> b = permute_sym(a, perm);
  const RowPattern rows = row_pattern(b);

  SparseLdlt<T> f;
  f.perm = std::move(perm);
  f.etree = etree_from_rows(n, rows);
  f.anorm = norm_inf(b);

  // Symbolic: column counts from row patterns, then row indices in
  // increasing row order so every column comes out sorted.
  std::vector<Index> flag(n), stack(n);
  f.colptr.assign(static_cast<std::size_t>(n) + 1, 0);
  for (Index k = 0; k < n; ++k) {
    Index top = ereach(k, rows, f.etree, flag, stack, n);
    for (Index t = top; t < n; ++t) ++f.colptr[stack[t] + 1];
  }
  for (Index j = 0; j < n; ++j) f.colptr[j + 1] += f.colptr[j];
  f.rowidx.resize(static_cast<std::size_t>(f.colptr.back()));
  f.lvalues.assign(f.rowidx.size(), T(0));
  {
    std::vector<Offset> next(f.colptr.begin(), f.colptr.end() - 1);
    for (Index k = 0; k < n; ++k) {
      Index top = ereach(k, rows, f.etree, flag, stack, n);
      for (Index t = top; t < n; ++t) f.rowidx[next[stack[t]]++] = k;
    }
  }

  // Numeric, left-looking. cursor[k] points at the first entry of column k
  // with row >= the column being computed.
  f.d.assign(n, T(0));
  f.perturbed.assign(n, 0);
  std::vector<T> x(n, T(0));
  std::vector<Offset> cursor(f.colptr.begin(), f.colptr.end() - 1);
  const double tiny = kPivotTau * f.anorm;
  const double replacement = tiny > 0.0 ? tiny : kPivotTau;
  for (Index j = 0; j < n; ++j) {
    for (Offset p = b.colptr[j]; p < b.colptr[j + 1]; ++p) x[b.rowidx[p]] = b.values[p];
    Index top = ereach(j, rows, f.etree, flag, stack, n);
    for (Index t = top; t < n; ++t) {
      const Index k = stack[t];
      const Offset pk = cursor[k]++;  // entry (j, k)
      const T ljk = f.lvalues[pk];
      const T s = ljk * f.d[k];
      x[j] -= ljk * s;
      const Offset end = f.colptr[k + 1];
      for (Offset p = pk + 1; p < end; ++p) x[f.rowidx[p]] -= f.lvalues[p] * s;
    }
    T dj = x[j];
    x[j] = T(0);
    if (magnitude(dj) < tiny || dj == T(0)) {
      dj = unit_sign(dj) * replacement;
      f.perturbed[j] = 1;
    }
    f.d[j] = dj;
    for (Offset p = f.colptr[j]; p < f.colptr[j + 1]; ++p) {
      const Index i = f.rowidx[p];
      f.lvalues[p] = x[i] / dj;
      x[i] = T(0);
    }
  }
  return f;
}

template <typename T>
SparseLdlt<T> sparse_ldlt(const SymSparseMatrix<T>& a, const OrderingFn& order) {
  Graph g = adjacency_of(a);
  Permutation p = order ? order(g) : amd_order(g);
  return sparse_ldlt_with(a, std::move(p));
}

template <typename T>
void solve_factored_inplace(const SparseLdlt<T>& f, DenseMatrix<T>& x) {
  const Index n = f.n();
  require(x.rows() == n, ErrorCode::kDimensionMismatch, "solve: rhs rows != factor size");
  const Index k = x.cols();
  DenseMatrix<T> y(n, k);
  for (Index i = 0; i < n; ++i) std::copy_n(x.row(f.perm.perm[i]), k, y.row(i));
  for (Index j = 0; j < n; ++j) {
    const T* yj = y.row(j);
    for (Offset p = f.colptr[j]; p < f.colptr[j + 1]; ++p) {
      const T l = f.lvalues[p];
      T* yi = y.row(f.rowidx[p]);
      for (Index c = 0; c < k; ++c) yi[c] -= l * yj[c];
    }
  }
  for (Index j = 0; j < n; ++j) {
    const T dj = f.d[j];
    T* yj = y.row(j);
    for (Index c = 0; c < k; ++c) yj[c] /= dj;
  }
  for (Index j = n - 1; j >= 0; --j) {
    T* yj = y.row(j);
    for (Offset p = f.colptr[j]; p < f.colptr[j + 1]; ++p) {
      const T l = f.lvalues[p];
      const T* yi = y.row(f.rowidx[p]);
      for (Index c = 0; c < k; ++c) yj[c] -= l * yi[c];
    }
  }
  for (Index i = 0; i < n; ++i) std::copy_n(y.row(i), k, x.row(f.perm.perm[i]));
}

template <typename T>
DenseMatrix<T> solve_factored(const SparseLdlt<T>& f, const DenseMatrix<T>& rhs) {
  DenseMatrix<T> x = rhs;
  solve_factored_inplace(f, x);
  return x;
}

#define DDS_INSTANTIATE(T)                                                              \
  template struct SparseLdlt<T>;                                                        \
  template SparseLdlt<T> sparse_ldlt(const SymSparseMatrix<T>&, const OrderingFn&);     \
  template SparseLdlt<T> sparse_ldlt_with(const SymSparseMatrix<T>&, Permutation);      \
  template DenseMatrix<T> solve_factored(const SparseLdlt<T>&, const DenseMatrix<T>&);  \
  template void solve_factored_inplace(const SparseLdlt<T>&, DenseMatrix<T>&);          \
  template std::vector<Index> elimination_tree(const SymSparseMatrix<T>&);

DDS_INSTANTIATE(double)
DDS_INSTANTIATE(cdouble)

#undef DDS_INSTANTIATE

}  // namespace dds
