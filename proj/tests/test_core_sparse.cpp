#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "ddsolver/amd.hpp"
#include "ddsolver/matrix_market.hpp"
#include "ddsolver/sparse_ldlt.hpp"
#include "support.hpp"

using namespace dds;
using namespace dds::test;

namespace {

template <typename T>
SymSparseMatrix<T> make(Index n, std::vector<Triplet<T>> t) {
  return from_triplets<T>(n, t);
}

SymSparseMatrix<double> load_real(const std::string& text) {
  std::istringstream in(text);
  return std::get<SymSparseMatrix<double>>(load_matrix_market(in));
}

Graph path_graph(Index n) {
  std::vector<std::pair<Index, Index>> e;
  for (Index i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
  return Graph::from_edges(n, e);
}

// Fill edges created by eliminating vertices of g in `order`.
Offset simulated_fill(const Graph& g, const std::vector<Index>& order) {
  std::vector<std::set<Index>> adj(g.n);
  for (Index v = 0; v < g.n; ++v)
    for (Index u : g.neighbors(v)) adj[v].insert(u);
  std::vector<bool> gone(g.n, false);
  Offset fill = 0;
  for (Index v : order) {
    std::vector<Index> nb;
    for (Index u : adj[v])
      if (!gone[u]) nb.push_back(u);
    for (std::size_t a = 0; a < nb.size(); ++a)
      for (std::size_t b = a + 1; b < nb.size(); ++b)
        if (adj[nb[a]].insert(nb[b]).second) {
          adj[nb[b]].insert(nb[a]);
          ++fill;
        }
    gone[v] = true;
  }
  return fill;
}

template <typename T>
EMat<T> eigen_of(const SymSparseMatrix<T>& a) {
  EMat<T> m = EMat<T>::Zero(a.n, a.n);
  for (Index j = 0; j < a.n; ++j)
    for (Offset p = a.colptr[j]; p < a.colptr[j + 1]; ++p) {
      m(a.rowidx[p], j) = a.values[p];
      m(j, a.rowidx[p]) = a.values[p];
    }
  return m;
}

Permutation random_perm(Index n, std::mt19937_64& rng) {
  std::vector<Index> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), rng);
  return Permutation::from_perm(p);
}

}  // namespace

TEST(MatrixMarket, MissingDiagonalIsStructuralZero) {
  auto a = load_real(
      "%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 4.0\n2 1 1.0\n");
  EXPECT_EQ(a.n, 2);
  EXPECT_EQ(a.nnz(), 2);
  EXPECT_EQ(a.at(0, 0), 4.0);
  EXPECT_EQ(a.at(1, 0), 1.0);
  EXPECT_EQ(a.at(0, 1), 1.0);
  EXPECT_EQ(a.at(1, 1), 0.0);
}

TEST(MatrixMarket, DuplicatesAreSummed) {
  auto a = load_real(
      "%%MatrixMarket matrix coordinate real symmetric\n% comment\n1 1 2\n1 1 2.0\n1 1 3.0\n");
  EXPECT_EQ(a.nnz(), 1);
  EXPECT_EQ(a.at(0, 0), 5.0);
}

TEST(MatrixMarket, UpperEntriesAreMirrored) {
  auto a = load_real("%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 2 7\n");
  EXPECT_EQ(a.at(1, 0), 7.0);
  a.validate();
}

TEST(MatrixMarket, ErrorsCarryLineNumbers) {
  auto parse_error = [](const std::string& text, const std::string& needle) {
    std::istringstream in(text);
    try {
      load_matrix_market(in);
      ADD_FAILURE() << "no error for " << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kParse);
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  parse_error("%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n3 1 1.0\n", "line 3");
  parse_error("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 1.0\n", "line 1");
  parse_error("%%MatrixMarket matrix coordinate real symmetric\n2 3 1\n1 1 1.0\n", "line 2");
  parse_error("not a header\n", "line 1");
}

TEST(MatrixMarket, IdentityWritesThreeDiagonalLines) {
  auto id = make<double>(3, {{0, 0, 1.0}, {1, 1, 1.0}, {2, 2, 1.0}});
  std::ostringstream out;
  save_matrix_market(id, out);
  std::istringstream lines(out.str());
  std::string line;
  std::vector<std::string> body;
  while (std::getline(lines, line))
    if (!line.empty() && line[0] != '%') body.push_back(line);
  ASSERT_EQ(body.size(), 4u);
  EXPECT_EQ(body[0], "3 3 3");
  EXPECT_EQ(body[1], "1 1 1");
  EXPECT_EQ(body[2], "2 2 1");
  EXPECT_EQ(body[3], "3 3 1");
}

TEST(MatrixMarket, ComplexHasTwoValueColumns) {
  auto a = make<cdouble>(1, {{0, 0, cdouble(1.5, -2.0)}});
  std::ostringstream out;
  save_matrix_market(a, out);
  EXPECT_NE(out.str().find("complex symmetric"), std::string::npos);
  EXPECT_NE(out.str().find("1 1 1.5 -2"), std::string::npos);
}

TEST(MatrixMarket, RoundTripIsBitExact) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 1 + trial * 3;
    auto tr = random_sym_triplets<double>(n, 0.3, 0.0, rng);
    for (auto& e : tr) e.value *= std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    auto a = from_triplets<double>(n, tr);
    std::stringstream s;
    save_matrix_market(a, s);
    EXPECT_EQ(std::get<SymSparseMatrix<double>>(load_matrix_market(s)), a);

    auto tc = random_sym_triplets<cdouble>(n, 0.3, 0.0, rng);
    auto c = from_triplets<cdouble>(n, tc);
    std::stringstream sc;
    save_matrix_market(c, sc);
    EXPECT_EQ(std::get<SymSparseMatrix<cdouble>>(load_matrix_market(sc)), c);
  }
}

TEST(MatrixMarket, DenseArrayRoundTrip) {
  std::mt19937_64 rng(3);
  auto m = random_dense<cdouble>(5, 3, rng);
  std::stringstream s;
  save_dense_matrix_market(m, s);
  EXPECT_EQ(std::get<DenseMatrix<cdouble>>(load_dense_matrix_market(s)), m);
}

TEST(Adjacency, DiagonalHasNoEdges) {
  auto g = adjacency_of(make<double>(3, {{0, 0, 1.0}, {1, 1, 2.0}, {2, 2, 3.0}}));
  EXPECT_EQ(g.edge_count(), 0);
}

TEST(Adjacency, TridiagonalIsPath) {
  auto g = adjacency_of(make<double>(
      4, {{0, 0, 2.0}, {1, 0, -1.0}, {1, 1, 2.0}, {2, 1, -1.0}, {2, 2, 2.0}, {3, 2, -1.0}, {3, 3, 2.0}}));
  EXPECT_EQ(g.edge_count(), 3);
  EXPECT_EQ(std::vector<Index>(g.neighbors(0).begin(), g.neighbors(0).end()), std::vector<Index>{1});
  EXPECT_EQ(std::vector<Index>(g.neighbors(1).begin(), g.neighbors(1).end()),
            (std::vector<Index>{0, 2}));
  EXPECT_EQ(std::vector<Index>(g.neighbors(3).begin(), g.neighbors(3).end()), std::vector<Index>{2});
}

TEST(Adjacency, ArrowIsStarAndKeepsExplicitZeros) {
  auto g = adjacency_of(make<double>(4, {{3, 0, 1.0}, {3, 1, 0.0}, {3, 2, 1.0}, {3, 3, 1.0}}));
  EXPECT_EQ(g.degree(3), 3);
  for (Index v = 0; v < 3; ++v) EXPECT_EQ(g.degree(v), 1);
}

Graph star(Index center, Index n) {
  std::vector<std::pair<Index, Index>> e;
  for (Index v = 0; v < n; ++v)
    if (v != center) e.push_back({center, v});
  return Graph::from_edges(n, e);
}

TEST(Amd, StarCenterIsLast) {
  EXPECT_EQ(amd_order(star(4, 5)).perm.back(), 4);
  // The final center/leaf pair ties at degree 1, so the center is never
  // eliminated before the last two steps.
  for (Index c = 0; c < 5; ++c) {
    auto p = amd_order(star(c, 5)).perm;
    EXPECT_GE(std::find(p.begin(), p.end(), c) - p.begin(), 3) << "center " << c;
  }
}

TEST(Amd, EmptyGraphIsIdentity) {
  auto g = Graph::from_edges(6, std::vector<std::pair<Index, Index>>{});
  EXPECT_EQ(amd_order(g).perm, Permutation::identity(6).perm);
}

TEST(Amd, PathReachesBruteForceMinimumFill) {
  auto g = path_graph(5);
  std::vector<Index> order(5);
  std::iota(order.begin(), order.end(), 0);
  Offset best = std::numeric_limits<Offset>::max();
  do best = std::min(best, simulated_fill(g, order));
  while (std::next_permutation(order.begin(), order.end()));
  EXPECT_EQ(best, 0);
  EXPECT_EQ(simulated_fill(g, amd_order(g).perm), best);
}

TEST(Amd, AlwaysBijectiveAndDeterministic) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 1 + static_cast<Index>(rng() % 120);
    auto a = from_triplets<double>(n, random_sym_triplets<double>(n, 0.05, 0.0, rng));
    auto g = adjacency_of(a);
    auto p = amd_order(g);
    EXPECT_NO_THROW(Permutation::from_perm(p.perm));
    EXPECT_EQ(amd_order(g).perm, p.perm);
  }
}

TEST(Amd, OrderingNeverAffectsCorrectness) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 20 + trial;
    auto t = random_sym_triplets<double>(n, 0.2, 0.0, rng);
    for (Index i = 0; i < n; ++i) t.push_back({i, i, 10.0});
    auto a = from_triplets<double>(n, t);
    auto b = random_dense<double>(n, 2, rng);
    auto x = solve_factored(sparse_ldlt_with(a, random_perm(n, rng)), b);
    for (double r : relative_residual(a, x, b)) EXPECT_LT(r, 1e-13);
  }
}

TEST(Permute, IdentityLeavesMatrix) {
  std::mt19937_64 rng(1);
  auto a = from_triplets<double>(10, random_sym_triplets<double>(10, 0.3, 0.0, rng));
  EXPECT_EQ(permute_sym(a, Permutation::identity(10)), a);
}

TEST(Permute, SwapTwoByTwo) {
  auto a = make<double>(2, {{0, 0, 4.0}, {1, 0, 1.0}, {1, 1, 3.0}});
  auto b = permute_sym(a, Permutation::from_perm({1, 0}));
  EXPECT_EQ(b.at(0, 0), 3.0);
  EXPECT_EQ(b.at(1, 0), 1.0);
  EXPECT_EQ(b.at(1, 1), 4.0);
}

TEST(Permute, InverseRestoresAndCompositionLaw) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = 1 + static_cast<Index>(rng() % 50);
    auto a = from_triplets<cdouble>(n, random_sym_triplets<cdouble>(n, 0.2, 0.0, rng));
    auto p = random_perm(n, rng);
    auto q = random_perm(n, rng);
    EXPECT_EQ(permute_sym(permute_sym(a, p), Permutation::from_perm(p.inverse)), a);
    EXPECT_EQ(permute_sym(a, p.compose(q)), permute_sym(permute_sym(a, q), p));
  }
}

TEST(Permute, RejectsNonBijection) {
  EXPECT_THROW(Permutation::from_perm({0, 0}), Error);
}

TEST(Matvec, Examples) {
  auto id = make<double>(2, {{0, 0, 1.0}, {1, 1, 1.0}});
  DenseMatrix<double> x(2, 2, {1.5, -2.0, 3.0, 4.0});
  EXPECT_EQ(matvec_sym(id, x), x);
  auto a = make<double>(2, {{0, 0, 4.0}, {1, 0, 1.0}, {1, 1, 3.0}});
  auto y = matvec_sym(a, DenseMatrix<double>(2, 1, {1.0, 1.0}));
  EXPECT_EQ(y(0, 0), 5.0);
  EXPECT_EQ(y(1, 0), 4.0);
  auto swap = make<double>(2, {{1, 0, 1.0}});
  auto z = matvec_sym(swap, DenseMatrix<double>(2, 1, {2.0, 5.0}));
  EXPECT_EQ(z(0, 0), 5.0);
  EXPECT_EQ(z(1, 0), 2.0);
}

template <typename T>
void matvec_oracle(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 1 + static_cast<Index>(rng() % 100);
    auto t = random_sym_triplets<T>(n, 0.1, 0.0, rng);
    auto a = from_triplets<T>(n, t);
    auto x = random_dense<T>(n, 3, rng);
    EMat<T> ref = dense_from_triplets(n, t) * to_eigen(x);
    EMat<T> got = to_eigen(matvec_sym(a, x));
    EXPECT_LE((ref - got).cwiseAbs().maxCoeff(), 1e-14 * std::max(1.0, ref.cwiseAbs().maxCoeff()));
  }
}

TEST(Matvec, DenseOracleReal) { matvec_oracle<double>(21); }
TEST(Matvec, DenseOracleComplexNoConjugation) { matvec_oracle<cdouble>(22); }

TEST(Matvec, DimensionMismatch) {
  auto a = make<double>(2, {{0, 0, 1.0}});
  EXPECT_THROW(matvec_sym(a, DenseMatrix<double>(3, 1)), Error);
}

TEST(Residual, Examples) {
  auto id = make<double>(2, {{0, 0, 1.0}, {1, 1, 1.0}});
  DenseMatrix<double> b(2, 3, {1, 2, 0, 3, 4, 0});
  auto r = relative_residual(id, b, b);
  ASSERT_EQ(r.size(), 3u);
  for (double v : r) EXPECT_EQ(v, 0.0);

  auto a = make<double>(2, {{0, 0, 4.0}, {1, 0, 1.0}, {1, 1, 3.0}});
  DenseMatrix<double> x(2, 1, {1.0 + 1e-3, 1.0});
  DenseMatrix<double> rhs(2, 1, {5.0, 4.0});
  const double v = relative_residual(a, x, rhs)[0];
  EXPECT_GT(v, 0.0);
  EXPECT_LT(v, 1e-2);
  // 4e-3 / (5 * 1.001 + 5)
  EXPECT_NEAR(v, 4e-3 / (5.0 * 1.001 + 5.0), 1e-15);
}

TEST(Sparse, TripletValidation) {
  std::mt19937_64 rng(2);
  auto a = from_triplets<double>(30, random_sym_triplets<double>(30, 0.2, 0.0, rng));
  EXPECT_NO_THROW(a.validate());
  EXPECT_EQ(eigen_of(a), eigen_of(permute_sym(a, Permutation::identity(30))));
}
