#include "ddsolver/driver.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "blas.hpp"
#include "ddsolver/memory.hpp"

namespace dds {

double SolveStats::seconds(const std::string& phase) const {
  for (const auto& p : phases)
    if (p.name == phase) return p.seconds;
  return 0.0;
}

double SolveStats::total_seconds() const {
  double s = 0.0;
  for (const auto& p : phases) s += p.seconds;
  return s;
}

Index default_parts(Index n) {
  const Index p = static_cast<Index>(std::lround(std::sqrt(static_cast<double>(n)) / 8.0));
  return std::max<Index>(1, std::min({std::clamp<Index>(p, 2, 64), n}));
}

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <typename T>
std::size_t sym_bytes(const SymSparseMatrix<T>& a) {
  return sizeof(T) * a.values.size() + sizeof(Index) * a.rowidx.size() +
         sizeof(Offset) * a.colptr.size();
}

template <typename T>
std::size_t rect_bytes(const SparseRect<T>& r) {
  return sizeof(T) * r.values.size() + sizeof(Index) * r.rowidx.size() +
         sizeof(Offset) * r.colptr.size();
}

std::size_t graph_bytes(const Graph& g) {
  return sizeof(Offset) * g.xadj.size() + sizeof(Index) * g.adj.size();
}

template <typename T>
std::size_t dense_bytes(Index rows, Index cols) {
  return sizeof(T) * static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
}

// Runs fn(i) for i in [begin, end) on up to `threads` threads.
template <typename F>
void parallel_for(Index begin, Index end, int threads, F&& fn) {
  const Index count = end - begin;
  if (threads <= 1 || count <= 1) {
    for (Index i = begin; i < end; ++i) fn(i);
    return;
  }
  const int nt = std::min<int>(threads, count);
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  for (int t = 0; t < nt; ++t)
    pool.emplace_back([&, t] {
      for (Index i = begin + t; i < end; i += nt) {
        try {
          fn(i);
        } catch (...) {
          errors[i - begin] = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

class PhaseClock {
 public:
  PhaseClock(MemoryLedger& ledger, SolveStats& stats) : ledger_(ledger), stats_(stats) {}

  void begin(const std::string& name) {
    finish();
    ledger_.begin_phase(name);
    stats_.phases.push_back({name, 0.0, 0});
    t0_ = Clock::now();
    open_ = true;
  }

  void finish() {
    if (!open_) return;
    stats_.phases.back().seconds = since(t0_);
    stats_.phases.back().peak_bytes = ledger_.phases().back().peak;
    stats_.peak_bytes = ledger_.peak();
    open_ = false;
  }

 private:
  MemoryLedger& ledger_;
  SolveStats& stats_;
  Clock::time_point t0_;
  bool open_ = false;
};

}  // namespace

template <typename T>
DDFactor<T> dd_factor(const SymSparseMatrix<T>& a, Index n_parts, int threads) {
  require(n_parts >= 1 && n_parts <= std::max<Index>(a.n, 1), ErrorCode::kInvalidArgument,
          "n_parts must lie in [1, n]");
  blas::use_single_thread();
  DDFactor<T> f;
  f.n = a.n;
  SolveStats& st = f.stats;
  st.n = a.n;
  st.nnz = a.nnz();
  st.n_parts = n_parts;
  MemoryLedger ledger;
  PhaseClock clock(ledger, st);

  clock.begin("partition");
  std::vector<InterfaceGroup> groups;
  ArrowheadSplit<T> split;
  {
    const Graph g = adjacency_of(a);
    const std::size_t gb = graph_bytes(g) + sizeof(Index) * static_cast<std::size_t>(a.n);
    ledger.charge(gb);
    const Partition p = partition(g, n_parts);
    const InterfaceClassification c = classify(g, p);
    groups = group_interface(c);
    f.layout = build_layout(g, p, c, groups);
    ledger.charge(sizeof(Index) * 2 * static_cast<std::size_t>(a.n));
    split = split_arrowhead(a, f.layout);
    ledger.charge(split.bytes());
    ledger.release(gb);
  }
  const InterfaceIndex ifx = InterfaceIndex::from(f.layout, groups);
  st.n_interface = f.layout.interface_size();
  st.n_groups = f.layout.n_groups;

  clock.begin("subdomain_factor");
  f.interior.resize(n_parts);
  std::vector<std::size_t> order_ws(n_parts);
  parallel_for(0, n_parts, threads, [&](Index q) {
    order_ws[q] = graph_bytes(adjacency_of(split.a_ii[q]));
    f.interior[q] = sparse_ldlt(split.a_ii[q], amd_order);
  });
  for (Index q = 0; q < n_parts; ++q) {
    const std::size_t copy = sym_bytes(split.a_ii[q]);
    ledger.charge(order_ws[q] + copy);
    ledger.charge(f.interior[q].bytes());
    ledger.release(order_ws[q] + copy);
    ledger.release(copy);
    split.a_ii[q] = SymSparseMatrix<T>{};
    st.perturbations += f.interior[q].perturbation_count();
  }

  clock.begin("schur");
  std::vector<Index> sizes;
  for (Index g = 0; g < ifx.n_groups(); ++g) sizes.push_back(ifx.group_size(g));
  BlockSparseSym<T> s(std::move(sizes));
  ledger.charge(s.bytes());
  const int wave = std::max(threads, 1);
  for (Index w0 = 0; w0 < n_parts; w0 += wave) {
    const Index w1 = std::min<Index>(n_parts, w0 + wave);
    std::vector<SchurContribution<T>> contrib(w1 - w0);
    std::vector<std::size_t> ws(w1 - w0);
    parallel_for(w0, w1, threads, [&](Index q) {
      contrib[q - w0] =
          schur_contribution(q, f.interior[q], split.a_ib[q], split.a_bb, ifx, &ws[q - w0]);
    });
    for (Index q = w0; q < w1; ++q) {
      const auto& c = contrib[q - w0];
      ledger.charge(ws[q - w0]);
      ledger.release(ws[q - w0]);
      ledger.charge(c.bytes());
      ledger.charge(accumulate_contribution(s, c));
      ledger.release(c.bytes());
    }
  }
  s.symmetrize();
  ledger.release(sym_bytes(split.a_bb));
  split.a_bb = SymSparseMatrix<T>{};
  f.a_ib = std::move(split.a_ib);

  clock.begin("interface_symbolic");
  const BlockSymbolic sym = block_symbolic(s);
  std::size_t sym_index = sizeof(Index) * (2 * sym.order.size() + 2 * sym.fill.size());
  for (const auto& b : sym.below) sym_index += sizeof(Index) * b.size();
  ledger.charge(sym_index);
  const std::size_t unfilled = s.bytes();
  for (const auto& [r, c] : sym.fill) s.insert(r, c);
  const std::size_t filled = s.bytes();
  ledger.charge(filled - unfilled);
  f.fill_blocks = sym.fill.size();
  {
    std::ostringstream out;
    s.dump(out);
    out << "fill_blocks " << sym.fill.size() << '\n';
    f.interface_summary = out.str();
  }

  clock.begin("interface_numeric");
  f.interface = block_numeric(std::move(s), sym);
  ledger.charge(f.interface.peak_bytes - filled);
  ledger.release(f.interface.peak_bytes);
  ledger.charge(f.interface.bytes());
  ledger.release(sym_index);
  st.perturbations += f.interface.perturbed;
  clock.finish();

  f.bytes = ledger.current();
  return f;
}

template <typename T>
DenseMatrix<T> dd_solve(const DDFactor<T>& f, const DenseMatrix<T>& b, SolveStats* stats,
                        int threads) {
  require(b.rows() == f.n, ErrorCode::kDimensionMismatch, "dd_solve: rhs rows != n");
  const Index k = b.cols();
  const auto& lay = f.layout;
  const Index np = lay.n_parts;
  const Index ib = lay.interface_begin();
  const Index nb = lay.interface_size();
  SolveStats local;
  SolveStats& st = stats ? *stats : local;
  MemoryLedger ledger;
  ledger.charge(f.bytes);
  PhaseClock clock(ledger, st);
  clock.begin("solve");

  std::vector<DenseMatrix<T>> bi(np);
  for (Index q = 0; q < np; ++q) {
    bi[q] = DenseMatrix<T>(lay.part_size(q), k);
    for (Index r = 0; r < lay.part_size(q); ++r)
      std::copy_n(b.row(lay.perm.perm[lay.part_offsets[q] + r]), k, bi[q].row(r));
  }
  DenseMatrix<T> g(nb, k);
  for (Index r = 0; r < nb; ++r) std::copy_n(b.row(lay.perm.perm[ib + r]), k, g.row(r));
  ledger.charge(dense_bytes<T>(f.n, k));

  // g = b_b - sum_i A_ib^T A_ii^{-1} b_i, accumulated in ascending part order.
  const int wave = std::max(threads, 1);
  for (Index w0 = 0; w0 < np; w0 += wave) {
    const Index w1 = std::min<Index>(np, w0 + wave);
    std::vector<DenseMatrix<T>> t(w1 - w0);
    parallel_for(w0, w1, threads, [&](Index q) {
      t[q - w0] = bi[q];
      solve_factored_inplace(f.interior[q], t[q - w0]);
    });
    for (Index q = w0; q < w1; ++q) {
      ledger.charge(dense_bytes<T>(lay.part_size(q), k));
      subtract_transpose_product(f.a_ib[q], t[q - w0], g);
      ledger.release(dense_bytes<T>(lay.part_size(q), k));
    }
  }

  ledger.charge(3 * dense_bytes<T>(nb, k));
  const DenseMatrix<T> xb = block_solve(f.interface, g);
  ledger.release(2 * dense_bytes<T>(nb, k));

  DenseMatrix<T> x(f.n, k);
  ledger.charge(dense_bytes<T>(f.n, k));
  std::vector<DenseMatrix<T>> xi(np);
  parallel_for(0, np, threads,
               [&](Index q) { xi[q] = interior_recover(f.interior[q], f.a_ib[q], xb, bi[q]); });
  for (Index q = 0; q < np; ++q)
    for (Index r = 0; r < lay.part_size(q); ++r)
      std::copy_n(xi[q].row(r), k, x.row(lay.perm.perm[lay.part_offsets[q] + r]));
  for (Index r = 0; r < nb; ++r) std::copy_n(xb.row(r), k, x.row(lay.perm.perm[ib + r]));
  clock.finish();

  st.n = f.n;
  st.n_parts = np;
  st.n_interface = nb;
  st.n_groups = lay.n_groups;
  return x;
}

template <typename T>
BaselineFactor<T> baseline_factor(const SymSparseMatrix<T>& a) {
  blas::use_single_thread();
  BaselineFactor<T> f;
  SolveStats& st = f.stats;
  st.n = a.n;
  st.nnz = a.nnz();
  st.n_parts = 1;
  MemoryLedger ledger;
  PhaseClock clock(ledger, st);

  clock.begin("order");
  Permutation perm;
  std::size_t gb = 0;
  {
    const Graph g = adjacency_of(a);
    gb = graph_bytes(g);
    ledger.charge(gb);
    perm = amd_order(g);
    ledger.charge(sizeof(Index) * 2 * static_cast<std::size_t>(a.n));
  }

  clock.begin("factor");
  const std::size_t copy = sym_bytes(a);
  ledger.charge(copy);
  f.factor = sparse_ldlt_with(a, std::move(perm));
  ledger.charge(f.factor.bytes());
  ledger.release(copy + gb + sizeof(Index) * 2 * static_cast<std::size_t>(a.n));
  st.perturbations = f.factor.perturbation_count();
  clock.finish();

  f.bytes = ledger.current();
  return f;
}

template <typename T>
DenseMatrix<T> baseline_solve(const BaselineFactor<T>& f, const DenseMatrix<T>& b,
                              SolveStats* stats) {
  require(b.rows() == f.factor.n(), ErrorCode::kDimensionMismatch,
          "baseline_solve: rhs rows != n");
  SolveStats local;
  SolveStats& st = stats ? *stats : local;
  MemoryLedger ledger;
  ledger.charge(f.bytes);
  PhaseClock clock(ledger, st);
  clock.begin("solve");
  ledger.charge(2 * dense_bytes<T>(b.rows(), b.cols()));
  DenseMatrix<T> x = solve_factored(f.factor, b);
  clock.finish();
  st.n = f.factor.n();
  return x;
}

#define DDS_INSTANTIATE(T)                                                                      \
  template DDFactor<T> dd_factor(const SymSparseMatrix<T>&, Index, int);                        \
  template DenseMatrix<T> dd_solve(const DDFactor<T>&, const DenseMatrix<T>&, SolveStats*, int); \
  template BaselineFactor<T> baseline_factor(const SymSparseMatrix<T>&);                        \
  template DenseMatrix<T> baseline_solve(const BaselineFactor<T>&, const DenseMatrix<T>&,       \
                                         SolveStats*);

DDS_INSTANTIATE(double)
DDS_INSTANTIATE(cdouble)

#undef DDS_INSTANTIATE

}  // namespace dds
