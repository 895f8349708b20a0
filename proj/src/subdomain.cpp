#include "ddsolver/subdomain.hpp"

#include <algorithm>
#include <map>

#include "blas.hpp"

namespace dds {
namespace {

template <typename T>
SparseRect<T> rect_from_triplets(Index rows, Index cols, std::vector<Triplet<T>>& trips) {
  std::stable_sort(trips.begin(), trips.end(), [](const Triplet<T>& a, const Triplet<T>& b) {
    return a.col != b.col ? a.col < b.col : a.row < b.row;
  });
  SparseRect<T> r;
  r.rows = rows;
  r.cols = cols;
  r.colptr.assign(static_cast<std::size_t>(cols) + 1, 0);
  r.rowidx.reserve(trips.size());
  r.values.reserve(trips.size());
  for (const auto& t : trips) {
    r.rowidx.push_back(t.row);
    r.values.push_back(t.value);
    ++r.colptr[t.col + 1];
  }
  for (Index c = 0; c < cols; ++c) r.colptr[c + 1] += r.colptr[c];
  return r;
}

template <typename T>
std::size_t rect_bytes(const SparseRect<T>& r) {
  return sizeof(T) * r.values.size() + sizeof(Index) * r.rowidx.size() +
         sizeof(Offset) * r.colptr.size();
}

template <typename T>
std::size_t sym_bytes(const SymSparseMatrix<T>& a) {
  return sizeof(T) * a.values.size() + sizeof(Index) * a.rowidx.size() +
         sizeof(Offset) * a.colptr.size();
}

}  // namespace

template <typename T>
std::size_t ArrowheadSplit<T>::bytes() const {
  std::size_t b = sym_bytes(a_bb);
  for (const auto& m : a_ii) b += sym_bytes(m);
  for (const auto& m : a_ib) b += rect_bytes(m);
  return b;
}

template <typename T>
ArrowheadSplit<T> split_arrowhead(const SymSparseMatrix<T>& a, const ArrowheadLayout& layout) {
  require(layout.perm.size() == a.n, ErrorCode::kDimensionMismatch,
          "layout size does not match the matrix");
  const Index np = layout.n_parts;
  const Index ib = layout.interface_begin();
  const Index nb = layout.interface_size();
  std::vector<Index> part_of(a.n), local(a.n);
  for (Index q = 0; q < np; ++q)
    for (Index k = layout.part_offsets[q]; k < layout.part_offsets[q + 1]; ++k) {
      part_of[k] = q;
      local[k] = k - layout.part_offsets[q];
    }
  for (Index k = ib; k < a.n; ++k) {
    part_of[k] = -1;
    local[k] = k - ib;
  }

  std::vector<std::vector<Triplet<T>>> ii(np), ibt(np);
  std::vector<Triplet<T>> bb;
  for (Index j = 0; j < a.n; ++j)
    for (Offset p = a.colptr[j]; p < a.colptr[j + 1]; ++p) {
      Index r = layout.perm.inverse[a.rowidx[p]];
      Index c = layout.perm.inverse[j];
      const T v = a.values[p];
      const Index pr = part_of[r], pc = part_of[c];
      if (pr >= 0 && pc >= 0) {
        require(pr == pc, ErrorCode::kDimensionMismatch,
                "matrix couples interiors of different parts; layout/matrix mismatch");
        ii[pr].push_back({local[r], local[c], v});
      } else if (pr < 0 && pc < 0) {
        bb.push_back({local[r], local[c], v});
      } else {
        if (pr < 0) std::swap(r, c);
        ibt[part_of[r]].push_back({local[r], local[c], v});
      }
    }
  ArrowheadSplit<T> s;
  s.a_ii.reserve(np);
  s.a_ib.reserve(np);
  for (Index q = 0; q < np; ++q) {
    s.a_ii.push_back(from_triplets<T>(layout.part_size(q), ii[q]));
    s.a_ib.push_back(rect_from_triplets(layout.part_size(q), nb, ibt[q]));
  }
  s.a_bb = from_triplets<T>(nb, bb);
  return s;
}

template <typename T>
SymSparseMatrix<T> reassemble_arrowhead(const ArrowheadSplit<T>& s, const ArrowheadLayout& layout) {
  std::vector<Triplet<T>> trips;
  const Index ib = layout.interface_begin();
  for (Index q = 0; q < layout.n_parts; ++q) {
    const Index off = layout.part_offsets[q];
    const auto& m = s.a_ii[q];
    for (Index j = 0; j < m.n; ++j)
      for (Offset p = m.colptr[j]; p < m.colptr[j + 1]; ++p)
        trips.push_back({off + m.rowidx[p], off + j, m.values[p]});
    const auto& r = s.a_ib[q];
    for (Index c = 0; c < r.cols; ++c)
      for (Offset p = r.colptr[c]; p < r.colptr[c + 1]; ++p)
        trips.push_back({ib + c, off + r.rowidx[p], r.values[p]});
  }
  for (Index j = 0; j < s.a_bb.n; ++j)
    for (Offset p = s.a_bb.colptr[j]; p < s.a_bb.colptr[j + 1]; ++p)
      trips.push_back({ib + s.a_bb.rowidx[p], ib + j, s.a_bb.values[p]});
  return from_triplets<T>(layout.perm.size(), trips);
}

InterfaceIndex InterfaceIndex::from(const ArrowheadLayout& layout,
                                    const std::vector<InterfaceGroup>& groups) {
  require(static_cast<Index>(groups.size()) == layout.n_groups, ErrorCode::kInvalidArgument,
          "group count disagrees with layout");
  InterfaceIndex x;
  const Index ib = layout.interface_begin();
  x.group_of.resize(layout.interface_size());
  for (Index g = 0; g < layout.n_groups; ++g) {
    x.offset.push_back(layout.group_offsets[g] - ib);
    x.signature.push_back(groups[g].signature);
    for (Index k = layout.group_offsets[g]; k < layout.group_offsets[g + 1]; ++k)
      x.group_of[k - ib] = g;
  }
  x.offset.push_back(layout.interface_size());
  return x;
}

template <typename T>
std::size_t SchurContribution<T>::bytes() const {
  std::size_t b = sizeof(Index) * footprint.size();
  for (const auto& blk : blocks) b += sizeof(T) * blk.block.size() + 2 * sizeof(Index);
  return b;
}

namespace {

bool contains(const std::vector<Index>& sorted, Index v) {
  return std::binary_search(sorted.begin(), sorted.end(), v);
}

Index intersection_size(const std::vector<Index>& a, const std::vector<Index>& b) {
  Index n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

}  // namespace

template <typename T>
DenseMatrix<T> schur_footprint_dense(Index part, const SparseLdlt<T>& f, const SparseRect<T>& a_ib,
                                     const SymSparseMatrix<T>& a_bb, const InterfaceIndex& ifx,
                                     std::vector<Index>& footprint,
                                     std::size_t* workspace_bytes) {
  const Index ni = f.n();
  const Index nb = a_bb.n;
  require(a_ib.rows == ni && a_ib.cols == nb && static_cast<Index>(ifx.group_of.size()) == nb,
          ErrorCode::kDimensionMismatch, "schur: group mapping mismatch");

  // Share of the interface self-coupling owned (partly) by this part.
  auto in_part = [&](Index b) { return contains(ifx.signature[ifx.group_of[b]], part); };
  std::vector<unsigned char> touched(nb, 0);
  for (Index c = 0; c < nb; ++c)
    if (a_ib.colptr[c + 1] > a_ib.colptr[c]) touched[c] = 1;
  std::vector<Triplet<T>> share;
  for (Index c = 0; c < nb; ++c) {
    if (!in_part(c)) continue;
    for (Offset p = a_bb.colptr[c]; p < a_bb.colptr[c + 1]; ++p) {
      const Index r = a_bb.rowidx[p];
      if (!in_part(r)) continue;
      const Index w = intersection_size(ifx.signature[ifx.group_of[r]],
                                        ifx.signature[ifx.group_of[c]]);
      share.push_back({r, c, a_bb.values[p] / static_cast<double>(w)});
      touched[r] = touched[c] = 1;
    }
  }
  footprint.clear();
  std::vector<Index> pos(nb, -1);
  for (Index b = 0; b < nb; ++b)
    if (touched[b]) {
      pos[b] = static_cast<Index>(footprint.size());
      footprint.push_back(b);
    }
  const Index fsz = static_cast<Index>(footprint.size());
  DenseMatrix<T> s(fsz, fsz);
  for (const auto& t : share) {
    const Index r = pos[t.row], c = pos[t.col];
    s(r, c) += t.value;
    if (r != c) s(c, r) += t.value;
  }

  // Coupled columns and rows of A_ib, packed densely.
  std::vector<Index> cols;
  for (Index c = 0; c < nb; ++c)
    if (a_ib.colptr[c + 1] > a_ib.colptr[c]) cols.push_back(c);
  std::vector<Index> row_pos(ni, -1), rows;
  for (Index c : cols)
    for (Offset p = a_ib.colptr[c]; p < a_ib.colptr[c + 1]; ++p) row_pos[a_ib.rowidx[p]] = 0;
  for (Index i = 0; i < ni; ++i)
    if (row_pos[i] == 0) {
      row_pos[i] = static_cast<Index>(rows.size());
      rows.push_back(i);
    }
  const Index m = static_cast<Index>(cols.size());
  const Index r = static_cast<Index>(rows.size());
  DenseMatrix<T> packed(r, m);
  for (Index k = 0; k < m; ++k)
    for (Offset p = a_ib.colptr[cols[k]]; p < a_ib.colptr[cols[k] + 1]; ++p)
      packed(row_pos[a_ib.rowidx[p]], k) = a_ib.values[p];

  std::size_t ws = sizeof(T) * (s.size() + packed.size()) +
                   sizeof(Index) * (footprint.size() + 2 * static_cast<std::size_t>(nb) + ni);
  std::size_t peak = ws;
  if (m > 0) {
    DenseMatrix<T> prod(m, std::min(m, kSchurPanelWidth));
    for (Index c0 = 0; c0 < m; c0 += kSchurPanelWidth) {
      const Index w = std::min(kSchurPanelWidth, m - c0);
      // W = A_ii^{-1} A_ib[:, panel]
      DenseMatrix<T> panel(ni, w);
      for (Index k = 0; k < w; ++k)
        for (Offset p = a_ib.colptr[cols[c0 + k]]; p < a_ib.colptr[cols[c0 + k] + 1]; ++p)
          panel(a_ib.rowidx[p], k) = a_ib.values[p];
      solve_factored_inplace(f, panel);
      DenseMatrix<T> wr(r, w);
      for (Index i = 0; i < r; ++i) std::copy_n(panel.row(rows[i]), w, wr.row(i));
      peak = std::max(peak, ws + sizeof(T) * (2 * panel.size() + wr.size() + prod.size()));
      // prod = packed^T * wr  (m x w)
      blas::gemm_tn(m, w, r, 1.0, packed.data(), m, wr.data(), w, 0.0, prod.data(),
                    prod.cols());
      for (Index a = 0; a < m; ++a) {
        T* srow = s.row(pos[cols[a]]);
        const T* prow = prod.row(a);
        for (Index k = 0; k < w; ++k) srow[pos[cols[c0 + k]]] -= prow[k];
      }
    }
  }
  if (workspace_bytes) *workspace_bytes = peak;
  return s;
}

template <typename T>
SchurContribution<T> schur_contribution(Index part, const SparseLdlt<T>& f,
                                        const SparseRect<T>& a_ib,
                                        const SymSparseMatrix<T>& a_bb,
                                        const InterfaceIndex& ifx,
                                        std::size_t* workspace_bytes) {
  SchurContribution<T> out;
  out.part = part;
  std::size_t ws = 0;
  DenseMatrix<T> s = schur_footprint_dense(part, f, a_ib, a_bb, ifx, out.footprint, &ws);
  const auto& fp = out.footprint;
  const Index fsz = static_cast<Index>(fp.size());

  // Groups touched by the footprint, each with its footprint positions.
  std::map<Index, std::vector<Index>> by_group;
  for (Index k = 0; k < fsz; ++k) by_group[ifx.group_of[fp[k]]].push_back(k);
  std::vector<Index> gids;
  for (const auto& [g, _] : by_group) gids.push_back(g);

  for (std::size_t a = 0; a < gids.size(); ++a)
    for (std::size_t b = 0; b <= a; ++b) {
      const Index gr = gids[a], gc = gids[b];
      ContributionBlock<T> blk{gr, gc, DenseMatrix<T>(ifx.group_size(gr), ifx.group_size(gc))};
      for (Index pr : by_group[gr]) {
        const Index lr = fp[pr] - ifx.offset[gr];
        for (Index pc : by_group[gc]) {
          const Index lc = fp[pc] - ifx.offset[gc];
          blk.block(lr, lc) = 0.5 * (s(pr, pc) + s(pc, pr));
        }
      }
      out.blocks.push_back(std::move(blk));
    }
  if (workspace_bytes) *workspace_bytes = std::max(ws, sizeof(T) * s.size() + out.bytes());
  return out;
}

template <typename T>
void subtract_transpose_product(const SparseRect<T>& a_ib, const DenseMatrix<T>& x,
                                DenseMatrix<T>& y) {
  require(x.rows() == a_ib.rows && y.rows() == a_ib.cols && x.cols() == y.cols(),
          ErrorCode::kDimensionMismatch, "A_ib^T x: shape mismatch");
  const Index k = x.cols();
  for (Index c = 0; c < a_ib.cols; ++c) {
    T* yc = y.row(c);
    for (Offset p = a_ib.colptr[c]; p < a_ib.colptr[c + 1]; ++p) {
      const T v = a_ib.values[p];
      const T* xr = x.row(a_ib.rowidx[p]);
      for (Index j = 0; j < k; ++j) yc[j] -= v * xr[j];
    }
  }
}

template <typename T>
DenseMatrix<T> interior_recover(const SparseLdlt<T>& f, const SparseRect<T>& a_ib,
                                const DenseMatrix<T>& x_b, const DenseMatrix<T>& b_i) {
  require(b_i.rows() == f.n() && a_ib.rows == f.n() && x_b.rows() == a_ib.cols &&
              x_b.cols() == b_i.cols(),
          ErrorCode::kDimensionMismatch, "interior_recover: shape mismatch");
  DenseMatrix<T> rhs = b_i;
  const Index k = rhs.cols();
  for (Index c = 0; c < a_ib.cols; ++c) {
    const T* xc = x_b.row(c);
    for (Offset p = a_ib.colptr[c]; p < a_ib.colptr[c + 1]; ++p) {
      const T v = a_ib.values[p];
      T* rr = rhs.row(a_ib.rowidx[p]);
      for (Index j = 0; j < k; ++j) rr[j] -= v * xc[j];
    }
  }
  solve_factored_inplace(f, rhs);
  return rhs;
}

#define DDS_INSTANTIATE(T)                                                                      \
  template struct ArrowheadSplit<T>;                                                            \
  template struct SchurContribution<T>;                                                         \
  template ArrowheadSplit<T> split_arrowhead(const SymSparseMatrix<T>&, const ArrowheadLayout&); \
  template SymSparseMatrix<T> reassemble_arrowhead(const ArrowheadSplit<T>&,                    \
                                                   const ArrowheadLayout&);                     \
  template SchurContribution<T> schur_contribution(Index, const SparseLdlt<T>&,                 \
                                                   const SparseRect<T>&,                        \
                                                   const SymSparseMatrix<T>&,                   \
                                                   const InterfaceIndex&, std::size_t*);        \
  template DenseMatrix<T> schur_footprint_dense(Index, const SparseLdlt<T>&,                    \
                                                const SparseRect<T>&, const SymSparseMatrix<T>&, \
                                                const InterfaceIndex&, std::vector<Index>&,     \
                                                std::size_t*);                                  \
  template void subtract_transpose_product(const SparseRect<T>&, const DenseMatrix<T>&,         \
                                           DenseMatrix<T>&);                                    \
  template DenseMatrix<T> interior_recover(const SparseLdlt<T>&, const SparseRect<T>&,          \
                                           const DenseMatrix<T>&, const DenseMatrix<T>&);

DDS_INSTANTIATE(double)
DDS_INSTANTIATE(cdouble)

#undef DDS_INSTANTIATE

}  // namespace dds
