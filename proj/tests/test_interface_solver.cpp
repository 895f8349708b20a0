#include <gtest/gtest.h>

#include <numeric>
#include <set>
#include <sstream>

#include "ddsolver/dense_bk.hpp"
#include "pipeline.hpp"

using namespace dds;
using namespace dds::test;

namespace {

template <typename T>
EMat<T> permuted(const EMat<T>& a, const std::vector<Index>& perm) {
  const auto n = static_cast<Index>(perm.size());
  EMat<T> out(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) out(i, j) = a(perm[i], perm[j]);
  return out;
}

template <typename T>
double reconstruction_error(const BlockSparseSym<T>& s, const BlockLDLFactor<T>& f) {
  EMat<T> full = to_eigen(s.expand_dense());
  EMat<T> l = to_eigen(f.l_dense()), d = to_eigen(f.d_dense());
  return inf_norm<T>(permuted(full, f.permutation().perm) - l * d * l.transpose()) /
         inf_norm<T>(full);
}

template <typename T>
double dense_residual(const EMat<T>& a, const EMat<T>& x, const EMat<T>& b) {
  double worst = 0.0;
  const double an = inf_norm<T>(a);
  for (Eigen::Index c = 0; c < b.cols(); ++c) {
    const double r = (a * x.col(c) - b.col(c)).cwiseAbs().maxCoeff();
    const double scale = an * x.col(c).cwiseAbs().maxCoeff() + b.col(c).cwiseAbs().maxCoeff();
    worst = std::max(worst, scale > 0 ? r / scale : r);
  }
  return worst;
}

// Group pairs created by eliminating groups in `order` on the block graph of s.
template <typename T>
std::set<std::pair<Index, Index>> brute_force_fill(const BlockSparseSym<T>& s,
                                                   const std::vector<Index>& order) {
  const Index g = s.n_groups();
  std::vector<std::set<Index>> adj(g);
  for (Index c = 0; c < g; ++c)
    for (const auto& [r, blk] : s.column(c))
      if (r != c) {
        adj[r].insert(c);
        adj[c].insert(r);
      }
  std::vector<bool> gone(g, false);
  std::set<std::pair<Index, Index>> fill;
  for (Index v : order) {
    std::vector<Index> nb;
    for (Index u : adj[v])
      if (!gone[u]) nb.push_back(u);
    for (std::size_t a = 0; a < nb.size(); ++a)
      for (std::size_t b = a + 1; b < nb.size(); ++b)
        if (adj[nb[a]].insert(nb[b]).second) {
          adj[nb[b]].insert(nb[a]);
          fill.insert({std::max(nb[a], nb[b]), std::min(nb[a], nb[b])});
        }
    gone[v] = true;
  }
  return fill;
}

std::vector<Index> random_sizes(std::mt19937_64& rng, Index lo_groups, Index hi_groups,
                                Index max_size) {
  const Index g = lo_groups + static_cast<Index>(rng() % (hi_groups - lo_groups + 1));
  std::vector<Index> sizes(g);
  for (auto& s : sizes) s = 1 + static_cast<Index>(rng() % max_size);
  return sizes;
}

// Positions run through the groups in elimination order; each must map back
// into the group it belongs to.
template <typename T>
void expect_restricted(const BlockLDLFactor<T>& f) {
  const auto p = f.permutation().perm;
  Index pos = 0;
  for (Index step = 0; step < f.n_groups(); ++step) {
    const Index g = f.order[step];
    for (Index k = 0; k < f.sizes[g]; ++k, ++pos) {
      EXPECT_GE(p[pos], f.offsets[g]);
      EXPECT_LT(p[pos], f.offsets[g + 1]);
    }
  }
}

template <typename T>
void block_corpus(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (int trial = 0; trial < 50; ++trial) {
    auto sizes = random_sizes(rng, 2, 8, 40);
    const double density = std::uniform_real_distribution<double>(0.3, 1.0)(rng);
    auto s = random_block_sym<T>(sizes, density, trial % 3 == 0, rng);
    auto sym = block_symbolic(s);
    auto f = block_numeric(s, sym);
    EXPECT_LE(reconstruction_error(s, f), 1e-11) << "trial " << trial;
    expect_restricted(f);
    auto b = random_dense<T>(s.n(), 3, rng);
    auto x = block_solve(f, b);
    EXPECT_LE(dense_residual<T>(to_eigen(s.expand_dense()), to_eigen(x), to_eigen(b)), 1e-12);
  }
}

}  // namespace

TEST(Assemble, SinglePartSingleGroup) {
  auto a = from_triplets<double>(3, std::vector<Triplet<double>>{
                                        {0, 0, 4.0}, {1, 0, -1.0}, {1, 1, 4.0}, {2, 1, -1.0}, {2, 2, 4.0}});
  auto s = stage(a, Partition{{0, 0, 1}, 2});
  ASSERT_EQ(s.ifx.n_groups(), 1);
  std::vector<SchurContribution<double>> one = {s.contributions[0]};
  one[0].part = 0;
  auto m = assemble_interface(one, s.ifx);
  EXPECT_EQ(m.block_count(), 1u);
  EXPECT_EQ(m.block(0, 0), s.contributions[0].blocks[0].block);
}

TEST(Assemble, TwoPartsSumToOracle) {
  auto a = from_triplets<double>(4, std::vector<Triplet<double>>{
                                        {0, 0, 4.0}, {1, 0, -1.0}, {1, 1, 4.0}, {2, 1, -1.0},
                                        {2, 2, 4.0}, {3, 2, -1.0}, {3, 3, 4.0}});
  auto s = stage(a, Partition{{0, 0, 1, 1}, 2});
  auto m = assemble_interface(s.contributions, s.ifx);
  EXPECT_EQ(m.n_groups(), 1);
  EXPECT_LE((to_eigen(m.block(0, 0)) - schur_oracle(full_of(a), s.layout)).cwiseAbs().maxCoeff(),
            1e-14);
  auto dup = s.contributions;
  dup[1].part = 0;
  EXPECT_THROW(assemble_interface(dup, s.ifx), Error);
}

TEST(Assemble, AbsentPairsStayAbsentAndDiagonalSymmetric) {
  std::mt19937_64 rng(5);
  auto a = from_triplets<double>(200, random_sym_triplets<double>(200, 0.02, 5.0, rng));
  auto s = stage(a, 4);
  auto m = assemble_interface(s.contributions, s.ifx);
  for (Index g = 0; g < m.n_groups(); ++g) {
    const auto& d = m.block(g, g);
    for (Index i = 0; i < d.rows(); ++i)
      for (Index j = 0; j < d.cols(); ++j) EXPECT_EQ(d(i, j), d(j, i));
  }
  std::set<std::pair<Index, Index>> touched;
  for (const auto& c : s.contributions)
    for (const auto& b : c.blocks) touched.insert({b.row_group, b.col_group});
  for (Index c = 0; c < m.n_groups(); ++c)
    for (const auto& [r, blk] : m.column(c)) EXPECT_TRUE(r == c || touched.count({r, c}));
}

TEST(Symbolic, BlockDiagonalHasNoFill) {
  std::mt19937_64 rng(1);
  auto s = random_block_sym<double>({3, 2, 4}, 0.0, false, rng);
  EXPECT_TRUE(block_symbolic(s).fill.empty());
  EXPECT_TRUE(block_symbolic(s, BlockOrdering::kCountDegree).fill.empty());
}

TEST(Symbolic, PathOfThreeGroups) {
  BlockSparseSym<double> s({2, 2, 2});
  s.insert(1, 0);
  s.insert(2, 1);
  auto middle_first = block_symbolic_with_order(s, {1, 0, 2});
  ASSERT_EQ(middle_first.fill.size(), 1u);
  EXPECT_EQ(middle_first.fill[0], (std::pair<Index, Index>{2, 0}));
  EXPECT_TRUE(block_symbolic_with_order(s, {0, 1, 2}).fill.empty());
  EXPECT_TRUE(block_symbolic(s, BlockOrdering::kCountDegree).fill.empty());
  EXPECT_TRUE(block_symbolic(s).fill.empty());
}

TEST(Symbolic, FillMatchesBruteForceElimination) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    auto sizes = random_sizes(rng, 2, 12, 6);
    auto s = random_block_sym<double>(sizes, 0.3, false, rng);
    for (auto ordering : {BlockOrdering::kWeightedDegree, BlockOrdering::kCountDegree}) {
      auto sym = block_symbolic(s, ordering);
      std::set<std::pair<Index, Index>> got(sym.fill.begin(), sym.fill.end());
      EXPECT_EQ(got.size(), sym.fill.size());
      EXPECT_EQ(got, brute_force_fill(s, sym.order));
      for (Index step = 0; step < sym.n_groups(); ++step)
        EXPECT_EQ(sym.position[sym.order[step]], step);
    }
  }
}

TEST(Symbolic, MinimumDegreeBeatsNaturalOrderMostly) {
  std::mt19937_64 rng(13);
  int count_ok = 0, weighted_ok = 0;
  const int trials = 100;
  for (int trial = 0; trial < trials; ++trial) {
    auto sizes = random_sizes(rng, 3, 14, 8);
    auto s = random_block_sym<double>(sizes, 0.25, false, rng);
    std::vector<Index> natural(sizes.size());
    std::iota(natural.begin(), natural.end(), 0);
    const auto nat = block_symbolic_with_order(s, natural).fill.size();
    count_ok += block_symbolic(s, BlockOrdering::kCountDegree).fill.size() <= nat;
    weighted_ok += block_symbolic(s, BlockOrdering::kWeightedDegree).fill.size() <= nat;
  }
  EXPECT_GE(count_ok, 90);
  EXPECT_GE(weighted_ok, 90);
}

TEST(DenseBk, Diagonal) {
  auto f = dense_bk_ldlt(DenseMatrix<double>(2, 2, {2.0, 0.0, 0.0, 3.0}));
  EXPECT_EQ(f.perm, (std::vector<Index>{0, 1}));
  EXPECT_EQ(f.l, DenseMatrix<double>::identity(2));
  EXPECT_EQ(f.d_diag, (std::vector<double>{2.0, 3.0}));
  EXPECT_EQ(f.two_by_two_count(), 0);
}

TEST(DenseBk, ZeroDiagonalForcesTwoByTwo) {
  auto f = dense_bk_ldlt(DenseMatrix<double>(2, 2, {0.0, 1.0, 1.0, 0.0}));
  EXPECT_EQ(f.two_by_two_count(), 1);
  EXPECT_EQ(f.d_matrix(), DenseMatrix<double>(2, 2, {0.0, 1.0, 1.0, 0.0}));
  EXPECT_EQ(f.l, DenseMatrix<double>::identity(2));
  EXPECT_EQ(f.perturbed, 0);
}

template <typename T>
void zero_diagonal_reconstruction(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (int trial = 0; trial < 20; ++trial) {
    DenseMatrix<T> b(20, 20);
    for (Index i = 0; i < 20; ++i)
      for (Index j = 0; j < i; ++j) b(i, j) = b(j, i) = draw<T>(rng);
    auto f = dense_bk_ldlt(b);
    EMat<T> l = to_eigen(f.l), d = to_eigen(f.d_matrix());
    EMat<T> pb = permuted(to_eigen(b), f.perm);
    EXPECT_LE(inf_norm<T>(pb - l * d * l.transpose()), 1e-13 * inf_norm<T>(to_eigen(b)));
    EXPECT_GT(f.two_by_two_count(), 0);
    // Growth of the reduced entries is bounded by (1 + 1/alpha) per step.
    const double growth = d.cwiseAbs().maxCoeff() / to_eigen(b).cwiseAbs().maxCoeff();
    EXPECT_LE(growth, std::pow(1.0 + 1.0 / kBunchKaufmanAlpha, 19));
  }
}

TEST(DenseBk, ZeroDiagonalReal) { zero_diagonal_reconstruction<double>(3); }
TEST(DenseBk, ZeroDiagonalComplex) { zero_diagonal_reconstruction<cdouble>(4); }

TEST(DenseBk, SingularIsPerturbedAndFlagged) {
  auto f = dense_bk_ldlt(DenseMatrix<double>(2, 2, {1.0, 0.0, 0.0, 0.0}));
  EXPECT_EQ(f.perturbed, 1);
}

TEST(DenseBk, AlphaConstant) {
  EXPECT_NEAR(kBunchKaufmanAlpha, (1.0 + std::sqrt(17.0)) / 8.0, 1e-16);
}

TEST(BlockNumeric, SingleGroupEqualsDense) {
  std::mt19937_64 rng(6);
  auto s = random_block_sym<double>({9}, 0.0, true, rng);
  auto f = block_numeric(s, block_symbolic(s));
  auto d = dense_bk_ldlt(s.block(0, 0));
  EXPECT_EQ(f.diag[0].perm, d.perm);
  EXPECT_EQ(f.diag[0].l, d.l);
  EXPECT_EQ(f.diag[0].d_diag, d.d_diag);
  EXPECT_EQ(f.diag[0].d_sub, d.d_sub);
}

TEST(BlockNumeric, BlockDiagonalIsPerBlock) {
  std::mt19937_64 rng(7);
  auto s = random_block_sym<cdouble>({3, 5, 2}, 0.0, false, rng);
  auto f = block_numeric(s, block_symbolic(s));
  for (Index g = 0; g < 3; ++g) {
    EXPECT_TRUE(f.lower[g].empty());
    EXPECT_EQ(f.diag[g].l, dense_bk_ldlt(s.block(g, g)).l);
  }
}

TEST(BlockNumeric, ThreeGroupsAgainstDenseExpansion) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    auto s = random_block_sym<double>({3, 4, 5}, 1.0, trial % 2 == 0, rng);
    auto f = block_numeric(s, block_symbolic(s));
    EXPECT_LE(reconstruction_error(s, f), 1e-12);
    expect_restricted(f);
  }
}

TEST(BlockNumeric, RandomCorpusReal) { block_corpus<double>(21); }
TEST(BlockNumeric, RandomCorpusComplex) { block_corpus<cdouble>(22); }

TEST(BlockNumeric, UnallocatedBlockFailsLoudly) {
  BlockSparseSym<double> s({2, 2, 2});
  for (Index g = 0; g < 3; ++g) s.block(g, g) = DenseMatrix<double>::identity(2);
  s.insert(1, 0)(0, 0) = 1.0;
  s.insert(2, 1)(1, 1) = 1.0;
  auto sym = block_symbolic_with_order(s, {1, 0, 2});
  sym.fill.clear();
  EXPECT_THROW(block_numeric(s, sym), Error);
}

TEST(BlockSolve, IdentityAndColumns) {
  BlockSparseSym<double> s({2, 3});
  s.block(0, 0) = DenseMatrix<double>::identity(2);
  s.block(1, 1) = DenseMatrix<double>::identity(3);
  std::mt19937_64 rng(9);
  auto b = random_dense<double>(5, 4, rng);
  EXPECT_EQ(block_solve(block_numeric(s, block_symbolic(s)), b), b);

  auto t = random_block_sym<cdouble>({4, 6, 3, 5}, 0.7, true, rng);
  auto f = block_numeric(t, block_symbolic(t));
  auto rhs = random_dense<cdouble>(t.n(), 6, rng);
  auto x = block_solve(f, rhs);
  for (Index c = 0; c < 6; ++c) EXPECT_EQ(x.column_block(c, 1), block_solve(f, rhs.column_block(c, 1)));
  EXPECT_THROW(block_solve(f, DenseMatrix<cdouble>(t.n() + 1, 1)), Error);
}

TEST(BlockSolve, PathExampleMatchesDenseSolve) {
  auto a = from_triplets<double>(4, std::vector<Triplet<double>>{
                                        {0, 0, 4.0}, {1, 0, -1.0}, {1, 1, 4.0}, {2, 1, -1.0},
                                        {2, 2, 4.0}, {3, 2, -1.0}, {3, 3, 4.0}});
  auto s = stage(a, Partition{{0, 0, 1, 1}, 2});
  auto m = assemble_interface(s.contributions, s.ifx);
  auto f = block_numeric(m, block_symbolic(m));
  DenseMatrix<double> r(2, 1, {1.0, -2.0});
  auto x = to_eigen(block_solve(f, r));
  EMat<double> ref = schur_oracle(full_of(a), s.layout).fullPivLu().solve(to_eigen(r));
  EXPECT_LE((x - ref).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(BlockSparse, DumpReportsStructure) {
  BlockSparseSym<double> s({2, 3, 1});
  s.insert(2, 0);
  std::ostringstream out;
  s.dump(out);
  EXPECT_NE(out.str().find("groups 3"), std::string::npos) << out.str();
  EXPECT_EQ(s.block_count(), 4u);
  EXPECT_THROW(s.block(1, 0), Error);
}
