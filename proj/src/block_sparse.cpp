#include "ddsolver/block_sparse.hpp"

#include <algorithm>
#include <ostream>
#include <set>

#include "blas.hpp"

namespace dds {

template <typename T>
BlockSparseSym<T>::BlockSparseSym(std::vector<Index> group_sizes)
    : sizes_(std::move(group_sizes)), cols_(sizes_.size()) {
  for (Index s : sizes_) {
    require(s >= 1, ErrorCode::kInvalidArgument, "group sizes must be positive");
    offsets_.push_back(offsets_.back() + s);
  }
  for (Index g = 0; g < n_groups(); ++g) insert(g, g);
}

template <typename T>
BlockSparseSym<T> BlockSparseSym<T>::from_dense(const DenseMatrix<T>& a,
                                                std::vector<Index> group_sizes) {
  BlockSparseSym s(std::move(group_sizes));
  require(a.rows() == s.n() && a.cols() == s.n(), ErrorCode::kDimensionMismatch,
          "from_dense: group sizes do not cover the matrix");
  for (Index c = 0; c < s.n_groups(); ++c)
    for (Index r = c; r < s.n_groups(); ++r) {
      bool any = r == c;
      for (Index i = 0; i < s.sizes_[r] && !any; ++i)
        for (Index j = 0; j < s.sizes_[c] && !any; ++j)
          any = a(s.offsets_[r] + i, s.offsets_[c] + j) != T(0);
      if (!any) continue;
      DenseMatrix<T>& b = s.insert(r, c);
      for (Index i = 0; i < s.sizes_[r]; ++i)
        for (Index j = 0; j < s.sizes_[c]; ++j) b(i, j) = a(s.offsets_[r] + i, s.offsets_[c] + j);
    }
  return s;
}

template <typename T>
bool BlockSparseSym<T>::has(Index r, Index c) const {
  if (r < c) std::swap(r, c);
  return cols_[c].count(r) != 0;
}

template <typename T>
DenseMatrix<T>& BlockSparseSym<T>::insert(Index r, Index c) {
  require(r >= c, ErrorCode::kInvalidArgument, "blocks are stored with row group >= col group");
  auto it = cols_[c].find(r);
  if (it == cols_[c].end()) it = cols_[c].emplace(r, DenseMatrix<T>(sizes_[r], sizes_[c])).first;
  return it->second;
}

template <typename T>
DenseMatrix<T>& BlockSparseSym<T>::block(Index r, Index c) {
  auto it = cols_[c].find(r);
  if (r < c || it == cols_[c].end())
    fail(ErrorCode::kInternal, "block (" + std::to_string(r) + "," + std::to_string(c) +
                                   ") was not allocated by the symbolic phase");
  return it->second;
}

template <typename T>
const DenseMatrix<T>& BlockSparseSym<T>::block(Index r, Index c) const {
  return const_cast<BlockSparseSym*>(this)->block(r, c);
}

template <typename T>
std::size_t BlockSparseSym<T>::block_count() const {
  std::size_t n = 0;
  for (const auto& col : cols_) n += col.size();
  return n;
}

template <typename T>
std::size_t BlockSparseSym<T>::bytes() const {
  std::size_t b = sizeof(Index) * (sizes_.size() + offsets_.size());
  for (const auto& col : cols_)
    for (const auto& [r, blk] : col) b += sizeof(T) * blk.size() + sizeof(Index);
  return b;
}

template <typename T>
void BlockSparseSym<T>::symmetrize() {
  for (Index g = 0; g < n_groups(); ++g) {
    DenseMatrix<T>& b = block(g, g);
    for (Index i = 0; i < sizes_[g]; ++i)
      for (Index j = 0; j < i; ++j) {
        const T v = 0.5 * (b(i, j) + b(j, i));
        b(i, j) = v;
        b(j, i) = v;
      }
  }
}

template <typename T>
DenseMatrix<T> BlockSparseSym<T>::expand_dense() const {
  DenseMatrix<T> a(n(), n());
  for (Index c = 0; c < n_groups(); ++c)
    for (const auto& [r, b] : cols_[c])
      for (Index i = 0; i < sizes_[r]; ++i)
        for (Index j = 0; j < sizes_[c]; ++j) {
          a(offsets_[r] + i, offsets_[c] + j) = b(i, j);
          a(offsets_[c] + j, offsets_[r] + i) = b(i, j);
        }
  return a;
}

template <typename T>
void BlockSparseSym<T>::dump(std::ostream& out) const {
  const std::size_t g = sizes_.size();
  const std::size_t pairs = g * (g + 1) / 2;
  out << "groups " << g << " n " << n() << " blocks " << block_count() << " of " << pairs
      << " density " << (pairs ? static_cast<double>(block_count()) / pairs : 0.0) << '\n';
  for (std::size_t k = 0; k < g; ++k) {
    out << "group " << k << " size " << sizes_[k] << " col_blocks";
    for (const auto& [r, b] : cols_[k]) out << ' ' << r;
    out << '\n';
  }
}

template <typename T>
std::size_t accumulate_contribution(BlockSparseSym<T>& s, const SchurContribution<T>& c) {
  std::size_t added = 0;
  for (const auto& blk : c.blocks) {
    require(blk.row_group >= blk.col_group && blk.row_group < s.n_groups() &&
                blk.block.rows() == s.group_size(blk.row_group) &&
                blk.block.cols() == s.group_size(blk.col_group),
            ErrorCode::kInvalidArgument, "assemble_interface: inconsistent group metadata");
    if (!s.has(blk.row_group, blk.col_group)) added += sizeof(T) * blk.block.size() + sizeof(Index);
    DenseMatrix<T>& dst = s.insert(blk.row_group, blk.col_group);
    auto out = dst.values();
    auto in = blk.block.values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += in[i];
  }
  return added;
}

template <typename T>
BlockSparseSym<T> assemble_interface(std::vector<SchurContribution<T>> contributions,
                                     const InterfaceIndex& ifx) {
  std::vector<Index> sizes;
  for (Index g = 0; g < ifx.n_groups(); ++g) sizes.push_back(ifx.group_size(g));
  BlockSparseSym<T> s(std::move(sizes));
  std::sort(contributions.begin(), contributions.end(),
            [](const auto& a, const auto& b) { return a.part < b.part; });
  for (std::size_t k = 1; k < contributions.size(); ++k)
    require(contributions[k].part != contributions[k - 1].part, ErrorCode::kInvalidArgument,
            "assemble_interface: duplicate part contribution");
  for (const auto& c : contributions) accumulate_contribution(s, c);
  s.symmetrize();
  return s;
}

namespace {

std::vector<std::set<Index>> group_graph(Index g, const auto& column_of) {
  std::vector<std::set<Index>> adj(g);
  for (Index c = 0; c < g; ++c)
    for (const auto& [r, b] : column_of(c))
      if (r != c) {
        adj[r].insert(c);
        adj[c].insert(r);
      }
  return adj;
}

// Eliminates groups in `order`, or by minimum degree when it is empty. A
// group's degree is the summed weight of its neighbors.
BlockSymbolic eliminate(std::vector<std::set<Index>> adj, std::vector<Index> order,
                        const std::vector<Offset>& weight) {
  const Index g = static_cast<Index>(adj.size());
  const bool min_degree = order.empty();
  BlockSymbolic sym;
  sym.position.assign(g, -1);
  sym.below.resize(g);
  std::vector<Offset> degree(g, 0);
  std::set<std::pair<Offset, Index>> queue;
  auto degree_of = [&](Index v) {
    Offset d = 0;
    for (Index u : adj[v]) d += weight[u];
    return d;
  };
  if (min_degree)
    for (Index v = 0; v < g; ++v) {
      degree[v] = degree_of(v);
      queue.insert({degree[v], v});
    }
  for (Index step = 0; step < g; ++step) {
    Index v;
    if (min_degree) {
      v = queue.begin()->second;
      queue.erase(queue.begin());
      sym.order.push_back(v);
    } else {
      v = order[step];
      require(v >= 0 && v < g && sym.position[v] < 0, ErrorCode::kInvalidArgument,
              "block order is not a permutation of the groups");
    }
    sym.position[v] = step;
    std::vector<Index> nb(adj[v].begin(), adj[v].end());
    sym.below[v] = nb;
    for (Index u : nb) {
      if (min_degree) queue.erase({degree[u], u});
      adj[u].erase(v);
    }
    for (std::size_t a = 0; a < nb.size(); ++a)
      for (std::size_t b = 0; b < a; ++b)
        if (adj[nb[a]].insert(nb[b]).second) {
          adj[nb[b]].insert(nb[a]);
          sym.fill.push_back({std::max(nb[a], nb[b]), std::min(nb[a], nb[b])});
        }
    if (min_degree)
      for (Index u : nb) {
        degree[u] = degree_of(u);
        queue.insert({degree[u], u});
      }
    adj[v].clear();
  }
  if (!min_degree) sym.order = std::move(order);
  for (auto& nb : sym.below)
    std::sort(nb.begin(), nb.end(),
              [&](Index a, Index b) { return sym.position[a] < sym.position[b]; });
  return sym;
}

template <typename T>
std::vector<Offset> group_weights(const BlockSparseSym<T>& s, BlockOrdering ordering) {
  std::vector<Offset> w(s.n_groups(), 1);
  if (ordering == BlockOrdering::kWeightedDegree)
    for (Index g = 0; g < s.n_groups(); ++g) w[g] = s.group_size(g);
  return w;
}

}  // namespace

template <typename T>
BlockSymbolic block_symbolic(const BlockSparseSym<T>& s, BlockOrdering ordering) {
  return eliminate(group_graph(s.n_groups(), [&](Index c) -> auto& { return s.column(c); }), {},
                   group_weights(s, ordering));
}

template <typename T>
BlockSymbolic block_symbolic_with_order(const BlockSparseSym<T>& s, std::vector<Index> order) {
  require(static_cast<Index>(order.size()) == s.n_groups(), ErrorCode::kInvalidArgument,
          "block order length differs from group count");
  return eliminate(group_graph(s.n_groups(), [&](Index c) -> auto& { return s.column(c); }),
                   std::move(order), group_weights(s, BlockOrdering::kCountDegree));
}

template <typename T>
std::size_t BlockLDLFactor<T>::bytes() const {
  std::size_t b = sizeof(Index) * (sizes.size() + offsets.size() + order.size() + position.size());
  for (const auto& f : diag)
    b += sizeof(T) * (f.l.size() + f.d_diag.size() + f.d_sub.size()) +
         sizeof(Index) * f.perm.size() + f.pivot.size();
  for (const auto& col : lower)
    for (const auto& [i, m] : col) b += sizeof(T) * m.size() + sizeof(Index);
  return b;
}

template <typename T>
Index BlockLDLFactor<T>::two_by_two_count() const {
  Index c = 0;
  for (const auto& f : diag) c += f.two_by_two_count();
  return c;
}

namespace {

// Offsets of each group in the eliminated (new) ordering.
std::vector<Index> new_offsets(const std::vector<Index>& sizes, const std::vector<Index>& order) {
  std::vector<Index> off(sizes.size());
  Index at = 0;
  for (Index g : order) {
    off[g] = at;
    at += sizes[g];
  }
  return off;
}

}  // namespace

template <typename T>
Permutation BlockLDLFactor<T>::permutation() const {
  std::vector<Index> p;
  p.reserve(n());
  for (Index g : order)
    for (Index k : diag[g].perm) p.push_back(offsets[g] + k);
  return Permutation::from_perm(std::move(p));
}

template <typename T>
DenseMatrix<T> BlockLDLFactor<T>::l_dense() const {
  const auto noff = new_offsets(sizes, order);
  DenseMatrix<T> l(n(), n());
  for (Index j = 0; j < n_groups(); ++j) {
    const auto& fj = diag[j];
    for (Index r = 0; r < sizes[j]; ++r)
      for (Index c = 0; c <= r; ++c) l(noff[j] + r, noff[j] + c) = fj.l(r, c);
    for (const auto& [i, m] : lower[j]) {
      std::vector<Index> inv(sizes[i]);
      for (Index k = 0; k < sizes[i]; ++k) inv[diag[i].perm[k]] = k;
      for (Index r = 0; r < sizes[i]; ++r)
        for (Index c = 0; c < sizes[j]; ++c) l(noff[i] + inv[r], noff[j] + c) = m(r, c);
    }
  }
  return l;
}

template <typename T>
DenseMatrix<T> BlockLDLFactor<T>::d_dense() const {
  const auto noff = new_offsets(sizes, order);
  DenseMatrix<T> d(n(), n());
  for (Index g = 0; g < n_groups(); ++g) {
    const DenseMatrix<T> dg = diag[g].d_matrix();
    for (Index r = 0; r < sizes[g]; ++r)
      for (Index c = 0; c < sizes[g]; ++c) d(noff[g] + r, noff[g] + c) = dg(r, c);
  }
  return d;
}

namespace {

// Each row of x replaced by row * D.
template <typename T>
void apply_d_cols(const DenseBkFactor<T>& d, DenseMatrix<T>& x) {
  const Index n = d.n();
  for (Index r = 0; r < x.rows(); ++r) {
    T* row = x.row(r);
    for (Index c = 0; c < n;) {
      if (d.pivot[c] == 1) {
        row[c] *= d.d_diag[c];
        ++c;
      } else {
        const T u = row[c], v = row[c + 1];
        row[c] = u * d.d_diag[c] + v * d.d_sub[c];
        row[c + 1] = u * d.d_sub[c] + v * d.d_diag[c + 1];
        c += 2;
      }
    }
  }
}

}  // namespace

template <typename T>
BlockLDLFactor<T> block_numeric(BlockSparseSym<T> s, const BlockSymbolic& sym) {
  const Index ng = s.n_groups();
  require(sym.n_groups() == ng, ErrorCode::kInvalidArgument,
          "symbolic structure does not match the matrix");
  for (const auto& [r, c] : sym.fill) s.insert(r, c);

  BlockLDLFactor<T> f;
  f.sizes = s.group_sizes();
  f.offsets.push_back(0);
  for (Index sz : f.sizes) f.offsets.push_back(f.offsets.back() + sz);
  f.order = sym.order;
  f.position = sym.position;
  f.diag.resize(ng);
  f.lower.resize(ng);

  std::size_t working = s.bytes();
  std::size_t factor = 0;
  f.peak_bytes = working;
  auto note = [&](std::size_t transient) {
    f.peak_bytes = std::max(f.peak_bytes, working + factor + transient);
  };
  std::vector<T> row_buf;
  for (Index j : sym.order) {
    const Index nj = s.group_size(j);
    DenseBkFactor<T>& dj = f.diag[j];
    dj = dense_bk_ldlt(s.block(j, j));
    f.perturbed += dj.perturbed;
    factor += sizeof(T) * (dj.l.size() + 2 * static_cast<std::size_t>(nj)) +
              sizeof(Index) * nj + nj;
    note(0);
    const std::size_t diag_bytes = sizeof(T) * s.block(j, j).size() + sizeof(Index);
    s.column(j).erase(j);
    working -= diag_bytes;

    // L_ij = A_ij P_j^T L_jj^{-T} D_j^{-1}, written over the block of A.
    const auto& below = sym.below[j];
    row_buf.resize(nj);
    for (const Index i : below) {
      const Index ni = s.group_size(i);
      DenseMatrix<T> x;
      if (i > j) {
        x = std::move(s.block(i, j));
        s.column(j).erase(i);
        working -= sizeof(T) * x.size() + sizeof(Index);
        for (Index r = 0; r < ni; ++r) {
          T* xr = x.row(r);
          for (Index c = 0; c < nj; ++c) row_buf[c] = xr[dj.perm[c]];
          std::copy(row_buf.begin(), row_buf.end(), xr);
        }
      } else {
        const DenseMatrix<T>& a = s.block(j, i);
        x = DenseMatrix<T>(ni, nj);
        for (Index r = 0; r < ni; ++r)
          for (Index c = 0; c < nj; ++c) x(r, c) = a(dj.perm[c], r);
        note(sizeof(T) * x.size());
        working -= sizeof(T) * a.size() + sizeof(Index);
        s.column(i).erase(j);
      }
      factor += sizeof(T) * x.size() + sizeof(Index);
      blas::trsm_right_lower_t_unit(ni, nj, dj.l.data(), nj, x.data(), nj);
      dj.apply_d_inverse_cols(x.data(), ni, nj);
      f.lower[j].push_back({i, std::move(x)});
    }

    // A(i1, i2) -= L_{i1 j} U_{i2 j}^T for stored pairs i1 >= i2, U = L D.
    const auto& lj = f.lower[j];
    for (std::size_t b = 0; b < below.size(); ++b) {
      const DenseMatrix<T>& lb = lj[b].second;
      DenseMatrix<T> u = lb;
      apply_d_cols(dj, u);
      note(sizeof(T) * u.size());
      for (std::size_t a = 0; a < below.size(); ++a) {
        if (below[a] < below[b]) continue;
        DenseMatrix<T>& c = s.block(below[a], below[b]);
        blas::gemm_nt(c.rows(), c.cols(), nj, -1.0, lj[a].second.data(), nj, u.data(), nj, 1.0,
                      c.data(), c.cols());
      }
    }
  }
  return f;
}

namespace {

template <typename T>
void forward_unit(const DenseMatrix<T>& l, DenseMatrix<T>& y) {
  const Index n = l.rows();
  const Index k = y.cols();
  for (Index i = 0; i < n; ++i) {
    T* yi = y.row(i);
    for (Index j = 0; j < i; ++j) {
      const T v = l(i, j);
      if (v == T(0)) continue;
      const T* yj = y.row(j);
      for (Index c = 0; c < k; ++c) yi[c] -= v * yj[c];
    }
  }
}

template <typename T>
void backward_unit_t(const DenseMatrix<T>& l, DenseMatrix<T>& y) {
  const Index n = l.rows();
  const Index k = y.cols();
  for (Index i = n - 1; i >= 0; --i) {
    T* yi = y.row(i);
    for (Index j = i + 1; j < n; ++j) {
      const T v = l(j, i);
      if (v == T(0)) continue;
      const T* yj = y.row(j);
      for (Index c = 0; c < k; ++c) yi[c] -= v * yj[c];
    }
  }
}

}  // namespace

template <typename T>
DenseMatrix<T> block_solve(const BlockLDLFactor<T>& f, const DenseMatrix<T>& rhs) {
  require(rhs.rows() == f.n(), ErrorCode::kDimensionMismatch, "block_solve: rhs rows != n_b");
  const Index k = rhs.cols();
  DenseMatrix<T> b = rhs;
  std::vector<DenseMatrix<T>> y(f.n_groups());

  for (Index j : f.order) {
    const Index nj = f.sizes[j];
    const auto& dj = f.diag[j];
    DenseMatrix<T>& yj = y[j];
    yj = DenseMatrix<T>(nj, k);
    for (Index c = 0; c < nj; ++c) std::copy_n(b.row(f.offsets[j] + dj.perm[c]), k, yj.row(c));
    forward_unit(dj.l, yj);
    for (const auto& [i, l] : f.lower[j])
      for (Index r = 0; r < f.sizes[i]; ++r) {
        T* br = b.row(f.offsets[i] + r);
        const T* lr = l.row(r);
        for (Index c = 0; c < nj; ++c) {
          if (lr[c] == T(0)) continue;
          const T* yc = yj.row(c);
          for (Index q = 0; q < k; ++q) br[q] -= lr[c] * yc[q];
        }
      }
  }
  for (Index g = 0; g < f.n_groups(); ++g) f.diag[g].apply_d_inverse_rows(y[g]);

  DenseMatrix<T> x(f.n(), k);
  for (auto it = f.order.rbegin(); it != f.order.rend(); ++it) {
    const Index j = *it;
    const auto& dj = f.diag[j];
    DenseMatrix<T>& v = y[j];
    for (const auto& [i, l] : f.lower[j])
      for (Index r = 0; r < f.sizes[i]; ++r) {
        const T* xr = x.row(f.offsets[i] + r);
        const T* lr = l.row(r);
        for (Index c = 0; c < f.sizes[j]; ++c) {
          if (lr[c] == T(0)) continue;
          T* vc = v.row(c);
          for (Index q = 0; q < k; ++q) vc[q] -= lr[c] * xr[q];
        }
      }
    backward_unit_t(dj.l, v);
    for (Index c = 0; c < f.sizes[j]; ++c)
      std::copy_n(v.row(c), k, x.row(f.offsets[j] + dj.perm[c]));
  }
  return x;
}

#define DDS_INSTANTIATE(T)                                                                     \
  template class BlockSparseSym<T>;                                                            \
  template struct BlockLDLFactor<T>;                                                           \
  template BlockSparseSym<T> assemble_interface(std::vector<SchurContribution<T>>,             \
                                                const InterfaceIndex&);                        \
  template std::size_t accumulate_contribution(BlockSparseSym<T>&, const SchurContribution<T>&); \
  template BlockSymbolic block_symbolic(const BlockSparseSym<T>&, BlockOrdering);                             \
  template BlockSymbolic block_symbolic_with_order(const BlockSparseSym<T>&, std::vector<Index>); \
  template BlockLDLFactor<T> block_numeric(BlockSparseSym<T>, const BlockSymbolic&);           \
  template DenseMatrix<T> block_solve(const BlockLDLFactor<T>&, const DenseMatrix<T>&);

DDS_INSTANTIATE(double)
DDS_INSTANTIATE(cdouble)

#undef DDS_INSTANTIATE

}  // namespace dds
