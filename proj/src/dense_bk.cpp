#include "ddsolver/dense_bk.hpp"

#include <cmath>
#include <utility>

namespace dds {

template <typename T>
Index DenseBkFactor<T>::two_by_two_count() const {
  Index c = 0;
  for (unsigned char p : pivot) c += (p == 2);
  return c;
}

template <typename T>
DenseMatrix<T> DenseBkFactor<T>::d_matrix() const {
  const Index n = this->n();
  DenseMatrix<T> d(n, n);
  for (Index k = 0; k < n; ++k) {
    d(k, k) = d_diag[k];
    if (pivot[k] == 2) {
      d(k + 1, k) = d_sub[k];
      d(k, k + 1) = d_sub[k];
    }
  }
  return d;
}

template <typename T>
void DenseBkFactor<T>::apply_d_inverse_rows(DenseMatrix<T>& x) const {
  const Index n = this->n();
  const Index k = x.cols();
  for (Index r = 0; r < n;) {
    if (pivot[r] == 1) {
      const T inv = T(1) / d_diag[r];
      T* xr = x.row(r);
      for (Index c = 0; c < k; ++c) xr[c] *= inv;
      ++r;
    } else {
      // Closed-form inverse of [[a, b], [b, c]].
      const T a = d_diag[r], b = d_sub[r], cc = d_diag[r + 1];
      const T det = a * cc - b * b;
      const T i11 = cc / det, i12 = -b / det, i22 = a / det;
      T* x0 = x.row(r);
      T* x1 = x.row(r + 1);
      for (Index c = 0; c < k; ++c) {
        const T u = x0[c], v = x1[c];
        x0[c] = i11 * u + i12 * v;
        x1[c] = i12 * u + i22 * v;
      }
      r += 2;
    }
  }
}

template <typename T>
void DenseBkFactor<T>::apply_d_inverse_cols(T* x, Index rows, Index ld) const {
  const Index n = this->n();
  for (Index c = 0; c < n;) {
    if (pivot[c] == 1) {
      const T inv = T(1) / d_diag[c];
      for (Index r = 0; r < rows; ++r) x[static_cast<std::size_t>(r) * ld + c] *= inv;
      ++c;
    } else {
      const T a = d_diag[c], b = d_sub[c], cc = d_diag[c + 1];
      const T det = a * cc - b * b;
      const T i11 = cc / det, i12 = -b / det, i22 = a / det;
      for (Index r = 0; r < rows; ++r) {
        T* row = x + static_cast<std::size_t>(r) * ld;
        const T u = row[c], v = row[c + 1];
        row[c] = u * i11 + v * i12;
        row[c + 1] = u * i12 + v * i22;
      }
      c += 2;
    }
  }
}

template <typename T>
DenseBkFactor<T> dense_bk_ldlt(const DenseMatrix<T>& b, double tau) {
  require(b.rows() == b.cols(), ErrorCode::kDimensionMismatch, "dense_bk_ldlt: block not square");
  const Index n = b.rows();
  DenseMatrix<T> a = b;  // lower triangle is the working storage
  DenseBkFactor<T> f;
  f.perm.resize(n);
  for (Index i = 0; i < n; ++i) f.perm[i] = i;
  f.d_diag.assign(n, T(0));
  f.d_sub.assign(n, T(0));
  f.pivot.assign(n, 1);

  double bnorm = 0.0;
  for (Index i = 0; i < n; ++i) {
    double s = 0.0;
    for (Index j = 0; j <= i; ++j) s += magnitude(a(i, j));
    for (Index j = i + 1; j < n; ++j) s += magnitude(a(j, i));
    bnorm = std::max(bnorm, s);
  }
  const double replacement = tau * (bnorm > 0.0 ? bnorm : 1.0);

  // Symmetric interchange of kk and kp (kk < kp) in lower storage, including
  // the already computed columns of L.
  auto interchange = [&](Index k, Index kk, Index kp, Index kstep) {
    for (Index i = kp + 1; i < n; ++i) std::swap(a(i, kk), a(i, kp));
    for (Index j = kk + 1; j < kp; ++j) std::swap(a(j, kk), a(kp, j));
    std::swap(a(kk, kk), a(kp, kp));
    if (kstep == 2) std::swap(a(k + 1, k), a(kp, k));
    for (Index j = 0; j < k; ++j) std::swap(a(kk, j), a(kp, j));
    std::swap(f.perm[kk], f.perm[kp]);
  };

  std::vector<T> work0(n), work1(n);
  Index k = 0;
  while (k < n) {
    Index kstep = 1;
    Index kp = k;
    const double absakk = magnitude(a(k, k));
    Index imax = k;
    double colmax = 0.0;
    for (Index i = k + 1; i < n; ++i) {
      const double v = magnitude(a(i, k));
      if (v > colmax) {
        colmax = v;
        imax = i;
      }
    }
    if (std::max(absakk, colmax) == 0.0) {
      a(k, k) = T(replacement);
      ++f.perturbed;
    } else if (absakk < kBunchKaufmanAlpha * colmax) {
      double rowmax = 0.0;
      for (Index j = k; j < imax; ++j) rowmax = std::max(rowmax, magnitude(a(imax, j)));
      for (Index i = imax + 1; i < n; ++i) rowmax = std::max(rowmax, magnitude(a(i, imax)));
      if (absakk >= kBunchKaufmanAlpha * colmax * (colmax / rowmax)) {
        kp = k;
      } else if (magnitude(a(imax, imax)) >= kBunchKaufmanAlpha * rowmax) {
        kp = imax;
      } else {
        kp = imax;
        kstep = 2;
      }
    }
    const Index kk = k + kstep - 1;
    if (kp != kk) interchange(k, kk, kp, kstep);

    if (kstep == 1) {
      const T dkk = a(k, k);
      const T inv = T(1) / dkk;
      for (Index j = k + 1; j < n; ++j) work0[j] = a(j, k) * inv;
      for (Index i = k + 1; i < n; ++i) {
        const T t = a(i, k);
        T* ai = a.row(i);
        if (t != T(0))
          for (Index j = k + 1; j <= i; ++j) ai[j] -= t * work0[j];
        ai[k] = work0[i];
      }
      f.d_diag[k] = dkk;
      f.pivot[k] = 1;
    } else {
      const T d11v = a(k, k), d21v = a(k + 1, k), d22v = a(k + 1, k + 1);
      if (k < n - 2) {
        const T d11 = d22v / d21v;
        const T d22 = d11v / d21v;
        const T t = T(1) / (d11 * d22 - T(1));
        const T d21 = t / d21v;
        for (Index j = k + 2; j < n; ++j) {
          work0[j] = d21 * (d11 * a(j, k) - a(j, k + 1));
          work1[j] = d21 * (d22 * a(j, k + 1) - a(j, k));
        }
        for (Index i = k + 2; i < n; ++i) {
          T* ai = a.row(i);
          const T c0 = ai[k], c1 = ai[k + 1];
          for (Index j = k + 2; j <= i; ++j) ai[j] -= c0 * work0[j] + c1 * work1[j];
          ai[k] = work0[i];
          ai[k + 1] = work1[i];
        }
      }
      f.d_diag[k] = d11v;
      f.d_diag[k + 1] = d22v;
      f.d_sub[k] = d21v;
      f.pivot[k] = 2;
      f.pivot[k + 1] = 0;
    }
    k += kstep;
  }

  f.l = DenseMatrix<T>(n, n);
  for (Index i = 0; i < n; ++i) {
    f.l(i, i) = T(1);
    for (Index j = 0; j < i; ++j) f.l(i, j) = a(i, j);
  }
  // The sub-diagonal entry of a 2x2 pivot belongs to D, not L.
  for (Index i = 0; i < n; ++i)
    if (f.pivot[i] == 2) f.l(i + 1, i) = T(0);
  return f;
}

template <typename T>
void dense_bk_solve(const DenseBkFactor<T>& f, DenseMatrix<T>& rhs) {
  const Index n = f.n();
  require(rhs.rows() == n, ErrorCode::kDimensionMismatch, "dense_bk_solve: rhs rows");
  const Index k = rhs.cols();
  DenseMatrix<T> y(n, k);
  for (Index i = 0; i < n; ++i) std::copy_n(rhs.row(f.perm[i]), k, y.row(i));
  for (Index i = 0; i < n; ++i) {
    T* yi = y.row(i);
    for (Index j = 0; j < i; ++j) {
      const T l = f.l(i, j);
      if (l == T(0)) continue;
      const T* yj = y.row(j);
      for (Index c = 0; c < k; ++c) yi[c] -= l * yj[c];
    }
  }
  f.apply_d_inverse_rows(y);
  for (Index i = n - 1; i >= 0; --i) {
    T* yi = y.row(i);
    for (Index j = i + 1; j < n; ++j) {
      const T l = f.l(j, i);
      if (l == T(0)) continue;
      const T* yj = y.row(j);
      for (Index c = 0; c < k; ++c) yi[c] -= l * yj[c];
    }
  }
  for (Index i = 0; i < n; ++i) std::copy_n(y.row(i), k, rhs.row(f.perm[i]));
}

template struct DenseBkFactor<double>;
template struct DenseBkFactor<cdouble>;
template DenseBkFactor<double> dense_bk_ldlt(const DenseMatrix<double>&, double);
template DenseBkFactor<cdouble> dense_bk_ldlt(const DenseMatrix<cdouble>&, double);
template void dense_bk_solve(const DenseBkFactor<double>&, DenseMatrix<double>&);
template void dense_bk_solve(const DenseBkFactor<cdouble>&, DenseMatrix<cdouble>&);

}  // namespace dds
