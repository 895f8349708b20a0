#include <gtest/gtest.h>

#include "ddsolver/sparse_ldlt.hpp"
#include "pipeline.hpp"

using namespace dds;
using namespace dds::test;

namespace {

template <typename T>
SymSparseMatrix<T> make(Index n, std::vector<Triplet<T>> t) {
  return from_triplets<T>(n, t);
}

SymSparseMatrix<double> tridiag4() {
  return make<double>(4, {{0, 0, 4.0},
                          {1, 0, -1.0},
                          {1, 1, 4.0},
                          {2, 1, -1.0},
                          {2, 2, 4.0},
                          {3, 2, -1.0},
                          {3, 3, 4.0}});
}

// Dense unit-lower L of a sparse factor, in the factor's permuted indexing.
template <typename T>
EMat<T> l_of(const SparseLdlt<T>& f) {
  const Index n = f.n();
  EMat<T> l = EMat<T>::Identity(n, n);
  for (Index j = 0; j < n; ++j)
    for (Offset p = f.colptr[j]; p < f.colptr[j + 1]; ++p) l(f.rowidx[p], j) = f.lvalues[p];
  return l;
}

template <typename T>
EMat<T> permuted(const EMat<T>& a, const Permutation& p) {
  const Index n = p.size();
  EMat<T> out(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) out(i, j) = a(p.perm[i], p.perm[j]);
  return out;
}

template <typename T>
void reconstruction_corpus(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  int checked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 1 + static_cast<Index>(rng() % 120);
    const double shift = (trial % 2) ? 0.0 : 6.0;
    auto t = random_sym_triplets<T>(n, 0.08, shift, rng);
    auto a = from_triplets<T>(n, t);
    auto f = sparse_ldlt(a);
    if (f.perturbation_count() > 0) continue;
    ++checked;
    EMat<T> pap = permuted(dense_from_triplets(n, t), f.perm);
    EMat<T> l = l_of(f);
    EMat<T> d = EMat<T>::Zero(n, n);
    for (Index i = 0; i < n; ++i) d(i, i) = f.d[i];
    EXPECT_LE(inf_norm<T>(pap - l * d * l.transpose()), 1e-11 * inf_norm<T>(pap)) << "n=" << n;
  }
  EXPECT_GE(checked, 45);
}

template <typename T>
void schur_corpus(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  for (int trial = 0; trial < count; ++trial) {
    const Index n = 20 + static_cast<Index>(rng() % 281);
    auto t = random_sym_triplets<T>(n, 4.0 / n, 5.0, rng);
    auto a = from_triplets<T>(n, t);
    auto s = stage(a, 2 + trial % 3);
    auto sum = assemble_interface(s.contributions, s.ifx).expand_dense();
    EMat<T> oracle = schur_oracle(dense_from_triplets(n, t), s.layout);
    ASSERT_EQ(oracle.rows(), sum.rows());
    EXPECT_LE(inf_norm<T>(to_eigen(sum) - oracle), 1e-11 * inf_norm<T>(dense_from_triplets(n, t)))
        << "trial " << trial;
  }
}

}  // namespace

TEST(NumericFactor, Diagonal) {
  auto f = sparse_ldlt_with(make<double>(2, {{0, 0, 2.0}, {1, 1, 3.0}}), Permutation::identity(2));
  EXPECT_EQ(f.nnz_l(), 0);
  EXPECT_EQ(f.d, (std::vector<double>{2.0, 3.0}));
}

TEST(NumericFactor, TwoByTwoNaturalOrder) {
  auto f = sparse_ldlt_with(make<double>(2, {{0, 0, 4.0}, {1, 0, 1.0}, {1, 1, 3.0}}),
                            Permutation::identity(2));
  ASSERT_EQ(f.nnz_l(), 1);
  EXPECT_EQ(f.lvalues[0], 0.25);
  EXPECT_EQ(f.d, (std::vector<double>{4.0, 2.75}));
}

TEST(NumericFactor, IndefiniteTwoByTwo) {
  auto a = make<double>(2, {{0, 0, 1.0}, {1, 0, 2.0}, {1, 1, 1.0}});
  auto f = sparse_ldlt_with(a, Permutation::identity(2));
  EXPECT_EQ(f.d, (std::vector<double>{1.0, -3.0}));
  EXPECT_EQ(f.lvalues[0], 2.0);
  EXPECT_EQ(f.perturbation_count(), 0);
}

TEST(NumericFactor, ZeroPivotIsPerturbedAndFlagged) {
  auto a = make<double>(2, {{0, 0, 0.0}, {1, 1, 2.0}});
  auto f = sparse_ldlt_with(a, Permutation::identity(2));
  EXPECT_EQ(f.perturbation_count(), 1);
  EXPECT_EQ(f.perturbed[0], 1);
  EXPECT_EQ(f.d[0], kPivotTau * 2.0);
}

TEST(NumericFactor, ReconstructionReal) { reconstruction_corpus<double>(101); }
TEST(NumericFactor, ReconstructionComplex) { reconstruction_corpus<cdouble>(102); }

TEST(SolveFactored, Examples) {
  auto id = make<double>(3, {{0, 0, 1.0}, {1, 1, 1.0}, {2, 2, 1.0}});
  DenseMatrix<double> b(3, 2, {1, 2, 3, 4, 5, 6});
  EXPECT_EQ(solve_factored(sparse_ldlt(id), b), b);

  auto a = make<double>(2, {{0, 0, 4.0}, {1, 0, 1.0}, {1, 1, 3.0}});
  auto x = solve_factored(sparse_ldlt(a), DenseMatrix<double>(2, 1, {5.0, 4.0}));
  EXPECT_NEAR(x(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(x(1, 0), 1.0, 1e-15);
  EXPECT_THROW(solve_factored(sparse_ldlt(a), DenseMatrix<double>(3, 1)), Error);
}

TEST(SolveFactored, ColumnsMatchSingleSolvesBitwise) {
  std::mt19937_64 rng(8);
  auto a = from_triplets<cdouble>(60, random_sym_triplets<cdouble>(60, 0.1, 3.0, rng));
  auto f = sparse_ldlt(a);
  auto b = random_dense<cdouble>(60, 7, rng);
  auto x = solve_factored(f, b);
  for (Index c = 0; c < 7; ++c) EXPECT_EQ(x.column_block(c, 1), solve_factored(f, b.column_block(c, 1)));
}

TEST(Split, SinglePart) {
  auto a = tridiag4();
  auto s = stage(a, 1);
  EXPECT_EQ(s.split.a_bb.n, 0);
  ASSERT_EQ(s.split.a_ii.size(), 1u);
  EXPECT_EQ(s.split.a_ii[0], permute_sym(a, s.layout.perm));
}

TEST(Split, PathExample) {
  auto a = tridiag4();
  auto s = stage(a, Partition{{0, 0, 1, 1}, 2});
  ASSERT_EQ(s.split.a_ii.size(), 2u);
  EXPECT_EQ(s.split.a_ii[0].n, 1);
  EXPECT_EQ(s.split.a_ii[0].at(0, 0), 4.0);
  EXPECT_EQ(s.split.a_ii[1].at(0, 0), 4.0);
  EXPECT_EQ(s.split.a_bb.n, 2);
  EXPECT_EQ(s.split.a_bb.at(0, 0), 4.0);
  EXPECT_EQ(s.split.a_bb.at(1, 0), -1.0);
  EXPECT_EQ(s.split.a_bb.at(1, 1), 4.0);
}

TEST(Split, ReassemblyIsBitExact) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 10 + static_cast<Index>(rng() % 200);
    auto a = from_triplets<cdouble>(n, random_sym_triplets<cdouble>(n, 3.0 / n, 2.0, rng));
    auto s = stage(a, 2 + trial % 4);
    EXPECT_EQ(reassemble_arrowhead(s.split, s.layout), permute_sym(a, s.layout.perm));
  }
}

TEST(Schur, DecoupledPartIsShareOnly) {
  SymSparseMatrix<double> a_bb = make<double>(2, {{0, 0, 3.0}, {1, 0, 1.0}, {1, 1, 7.0}});
  SparseRect<double> a_ib;
  a_ib.rows = 2;
  a_ib.cols = 2;
  a_ib.colptr = {0, 0, 0};
  ArrowheadLayout layout;
  layout.perm = Permutation::identity(4);
  layout.part_offsets = {0, 2};
  layout.group_offsets = {2, 4};
  layout.n_parts = 1;
  layout.n_groups = 1;
  auto ifx = InterfaceIndex::from(layout, {InterfaceGroup{{0}, {2, 3}}});
  auto f = sparse_ldlt(make<double>(2, {{0, 0, 1.0}, {1, 1, 1.0}}));
  auto c = schur_contribution(0, f, a_ib, a_bb, ifx);
  ASSERT_EQ(c.blocks.size(), 1u);
  EXPECT_EQ(c.blocks[0].block, DenseMatrix<double>(2, 2, {3.0, 1.0, 1.0, 7.0}));
}

TEST(Schur, TwoByTwoOnePart) {
  auto a = make<double>(2, {{0, 0, 4.0}, {1, 0, 1.0}, {1, 1, 3.0}});
  SparseRect<double> a_ib;
  a_ib.rows = 1;
  a_ib.cols = 1;
  a_ib.colptr = {0, 1};
  a_ib.rowidx = {0};
  a_ib.values = {1.0};
  ArrowheadLayout layout;
  layout.perm = Permutation::identity(2);
  layout.part_offsets = {0, 1};
  layout.group_offsets = {1, 2};
  layout.n_parts = 1;
  layout.n_groups = 1;
  auto ifx = InterfaceIndex::from(layout, {InterfaceGroup{{0}, {1}}});
  auto f = sparse_ldlt(make<double>(1, {{0, 0, 4.0}}));
  auto c = schur_contribution(0, f, a_ib, make<double>(1, {{0, 0, 3.0}}), ifx);
  ASSERT_EQ(c.blocks.size(), 1u);
  EXPECT_EQ(c.blocks[0].block(0, 0), 2.75);
}

TEST(Schur, PathExampleMatchesDenseOracle) {
  auto a = tridiag4();
  auto s = stage(a, Partition{{0, 0, 1, 1}, 2});
  auto sum = to_eigen(assemble_interface(s.contributions, s.ifx).expand_dense());
  EXPECT_LE((sum - schur_oracle(full_of(a), s.layout)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Schur, RandomOracleReal) { schur_corpus<double>(41, 15); }
TEST(Schur, RandomOracleComplex) { schur_corpus<cdouble>(42, 15); }

TEST(Schur, SumIsSymmetricBeforeSymmetrization) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    const Index n = 50 + static_cast<Index>(rng() % 200);
    auto a = from_triplets<double>(n, random_sym_triplets<double>(n, 4.0 / n, 5.0, rng));
    auto s = stage(a, 3);
    std::vector<Index> sizes;
    for (Index g = 0; g < s.ifx.n_groups(); ++g) sizes.push_back(s.ifx.group_size(g));
    BlockSparseSym<double> sum(sizes);
    for (const auto& c : s.contributions) accumulate_contribution(sum, c);
    EMat<double> m = to_eigen(sum.expand_dense());
    EXPECT_LE(inf_norm<double>(m - m.transpose()), 1e-13 * std::max(1.0, inf_norm<double>(m)));
  }
}

TEST(Recover, DecoupledAndZero) {
  std::mt19937_64 rng(3);
  auto a_ii = from_triplets<double>(5, random_sym_triplets<double>(5, 0.5, 4.0, rng));
  auto f = sparse_ldlt(a_ii);
  SparseRect<double> a_ib;
  a_ib.rows = 5;
  a_ib.cols = 3;
  a_ib.colptr = {0, 0, 0, 0};
  auto b = random_dense<double>(5, 2, rng);
  auto x_b = random_dense<double>(3, 2, rng);
  EXPECT_EQ(interior_recover(f, a_ib, x_b, b), solve_factored(f, b));

  a_ib.colptr = {0, 1, 1, 2};
  a_ib.rowidx = {0, 4};
  a_ib.values = {1.0, -2.0};
  auto zero = interior_recover(f, a_ib, DenseMatrix<double>(3, 2), DenseMatrix<double>(5, 2));
  for (double v : zero.values()) EXPECT_EQ(v, 0.0);
}

TEST(Recover, FullPipelineResidual) {
  std::mt19937_64 rng(90);
  for (int trial = 0; trial < 10; ++trial) {
    const Index n = 50 + static_cast<Index>(rng() % 450);
    auto t = random_sym_triplets<double>(n, 4.0 / n, 0.0, rng);
    // Diagonal dominance makes the instance SPD.
    std::vector<double> rowsum(n, 0.0);
    for (const auto& e : t)
      if (e.row != e.col) {
        rowsum[e.row] += std::abs(e.value);
        rowsum[e.col] += std::abs(e.value);
      }
    for (auto& e : t)
      if (e.row == e.col) e.value = rowsum[e.row] + 1.0;
    auto a = from_triplets<double>(n, t);
    auto s = stage(a, 2 + trial % 3);
    auto b = random_dense<double>(n, 3, rng);

    auto bp = DenseMatrix<double>(n, 3);
    for (Index i = 0; i < n; ++i)
      for (Index c = 0; c < 3; ++c) bp(i, c) = b(s.layout.perm.perm[i], c);
    const Index ib = s.layout.interface_begin(), nb = s.layout.interface_size();
    DenseMatrix<double> rb(nb, 3);
    for (Index i = 0; i < nb; ++i)
      for (Index c = 0; c < 3; ++c) rb(i, c) = bp(ib + i, c);
    std::vector<DenseMatrix<double>> bi;
    for (Index q = 0; q < s.p.n_parts; ++q) {
      DenseMatrix<double> part(s.layout.part_size(q), 3);
      for (Index i = 0; i < part.rows(); ++i)
        for (Index c = 0; c < 3; ++c) part(i, c) = bp(s.layout.part_offsets[q] + i, c);
      subtract_transpose_product(s.split.a_ib[q], solve_factored(s.factors[q], part), rb);
      bi.push_back(part);
    }
    auto sdense = to_eigen(assemble_interface(s.contributions, s.ifx).expand_dense());
    auto xb = from_eigen<double>(sdense.fullPivLu().solve(to_eigen(rb)));
    DenseMatrix<double> x(n, 3);
    for (Index i = 0; i < nb; ++i)
      for (Index c = 0; c < 3; ++c) x(s.layout.perm.perm[ib + i], c) = xb(i, c);
    for (Index q = 0; q < s.p.n_parts; ++q) {
      auto xi = interior_recover(s.factors[q], s.split.a_ib[q], xb, bi[q]);
      for (Index i = 0; i < xi.rows(); ++i)
        for (Index c = 0; c < 3; ++c) x(s.layout.perm.perm[s.layout.part_offsets[q] + i], c) = xi(i, c);
    }
    for (double r : relative_residual(a, x, b)) EXPECT_LE(r, 1e-10);
  }
}
