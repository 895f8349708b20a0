#pragma once

#include <Eigen/Dense>
#include <complex>
#include <random>
#include <vector>

#include "ddsolver/sparse.hpp"

namespace dds::test {

template <typename T>
using EMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

template <typename T>
T draw(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  if constexpr (std::is_same_v<T, double>) {
    return u(rng);
  } else {
    const double re = u(rng);
    return T(re, u(rng));
  }
}

/// Random symmetric triplets (lower triangle) with the given off-diagonal
/// density; `shift` is added to every diagonal entry.
template <typename T>
std::vector<Triplet<T>> random_sym_triplets(Index n, double density, double shift,
                                            std::mt19937_64& rng) {
  std::bernoulli_distribution keep(density);
  std::vector<Triplet<T>> t;
  for (Index j = 0; j < n; ++j) {
    t.push_back({j, j, draw<T>(rng) + T(shift)});
    for (Index i = j + 1; i < n; ++i)
      if (keep(rng)) t.push_back({i, j, draw<T>(rng)});
  }
  return t;
}

/// Full dense matrix built straight from triplets, independent of the
/// library's storage code.
template <typename T>
EMat<T> dense_from_triplets(Index n, const std::vector<Triplet<T>>& t) {
  EMat<T> a = EMat<T>::Zero(n, n);
  for (const auto& e : t) {
    a(e.row, e.col) += e.value;
    if (e.row != e.col) a(e.col, e.row) += e.value;
  }
  return a;
}

template <typename T>
EMat<T> to_eigen(const DenseMatrix<T>& m) {
  EMat<T> out(m.rows(), m.cols());
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) out(r, c) = m(r, c);
  return out;
}

template <typename T>
DenseMatrix<T> from_eigen(const EMat<T>& m) {
  DenseMatrix<T> out(static_cast<Index>(m.rows()), static_cast<Index>(m.cols()));
  for (Index r = 0; r < out.rows(); ++r)
    for (Index c = 0; c < out.cols(); ++c) out(r, c) = m(r, c);
  return out;
}

template <typename T>
double inf_norm(const EMat<T>& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

template <typename T>
DenseMatrix<T> random_dense(Index rows, Index cols, std::mt19937_64& rng) {
  DenseMatrix<T> m(rows, cols);
  for (auto& v : m.values()) v = draw<T>(rng);
  return m;
}

/// Dense Schur complement of `keep` in a, eliminating `drop`.
template <typename T>
EMat<T> dense_schur(const EMat<T>& a, const std::vector<Index>& drop,
                    const std::vector<Index>& keep) {
  const auto ni = static_cast<Eigen::Index>(drop.size());
  const auto nb = static_cast<Eigen::Index>(keep.size());
  EMat<T> aii(ni, ni), aib(ni, nb), abb(nb, nb);
  for (Eigen::Index i = 0; i < ni; ++i) {
    for (Eigen::Index j = 0; j < ni; ++j) aii(i, j) = a(drop[i], drop[j]);
    for (Eigen::Index j = 0; j < nb; ++j) aib(i, j) = a(drop[i], keep[j]);
  }
  for (Eigen::Index i = 0; i < nb; ++i)
    for (Eigen::Index j = 0; j < nb; ++j) abb(i, j) = a(keep[i], keep[j]);
  if (ni == 0) return abb;
  return abb - aib.transpose() * aii.fullPivLu().solve(aib);
}

}  // namespace dds::test
