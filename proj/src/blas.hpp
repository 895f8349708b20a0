#pragma once

#include <cblas.h>

#include "ddsolver/common.hpp"

namespace dds::blas {

// Row-major kernels. No conjugation anywhere: complex matrices are symmetric.

/// C[m x n] = alpha * A[m x k] * B[n x k]^T + beta * C
inline void gemm_nt(Index m, Index n, Index k, double alpha, const double* a, Index lda,
                    const double* b, Index ldb, double beta, double* c, Index ldc) {
  if (m == 0 || n == 0) return;
  cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasTrans, m, n, k, alpha, a, lda, b, ldb, beta, c,
              ldc);
}

inline void gemm_nt(Index m, Index n, Index k, double alpha, const cdouble* a, Index lda,
                    const cdouble* b, Index ldb, double beta, cdouble* c, Index ldc) {
  if (m == 0 || n == 0) return;
  const cdouble al(alpha), be(beta);
  cblas_zgemm(CblasRowMajor, CblasNoTrans, CblasTrans, m, n, k, &al, a, lda, b, ldb, &be, c, ldc);
}

/// C[m x n] = alpha * A[k x m]^T * B[k x n] + beta * C
inline void gemm_tn(Index m, Index n, Index k, double alpha, const double* a, Index lda,
                    const double* b, Index ldb, double beta, double* c, Index ldc) {
  if (m == 0 || n == 0) return;
  cblas_dgemm(CblasRowMajor, CblasTrans, CblasNoTrans, m, n, k, alpha, a, lda, b, ldb, beta, c,
              ldc);
}

inline void gemm_tn(Index m, Index n, Index k, double alpha, const cdouble* a, Index lda,
                    const cdouble* b, Index ldb, double beta, cdouble* c, Index ldc) {
  if (m == 0 || n == 0) return;
  const cdouble al(alpha), be(beta);
  cblas_zgemm(CblasRowMajor, CblasTrans, CblasNoTrans, m, n, k, &al, a, lda, b, ldb, &be, c, ldc);
}

/// X[m x n] := X * L^{-T}, L unit lower n x n.
inline void trsm_right_lower_t_unit(Index m, Index n, const double* l, Index ldl, double* x,
                                    Index ldx) {
  if (m == 0 || n == 0) return;
  cblas_dtrsm(CblasRowMajor, CblasRight, CblasLower, CblasTrans, CblasUnit, m, n, 1.0, l, ldl, x,
              ldx);
}

inline void trsm_right_lower_t_unit(Index m, Index n, const cdouble* l, Index ldl, cdouble* x,
                                    Index ldx) {
  if (m == 0 || n == 0) return;
  const cdouble one(1.0);
  cblas_ztrsm(CblasRowMajor, CblasRight, CblasLower, CblasTrans, CblasUnit, m, n, &one, l, ldl, x,
              ldx);
}

/// Pins the BLAS to one thread so results never depend on its scheduling.
void use_single_thread();

}  // namespace dds::blas
