#ifndef DDSOLVER_DDSOLVER_H
#define DDSOLVER_DDSOLVER_H

#include <stddef.h>
#include <stdint.h>

#if defined(DDS_BUILDING_LIBRARY)
#define DDS_API __attribute__((visibility("default")))
#else
#define DDS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Every call returns one; details via dds_last_error(). */
typedef enum {
  DDS_OK = 0,
  DDS_ERR_INVALID_ARGUMENT = 1,
  DDS_ERR_PARSE = 2,
  DDS_ERR_IO = 3,
  DDS_ERR_DIMENSION = 4,
  DDS_ERR_INTERNAL = 5,
  DDS_ERR_NULL = 6
} dds_status;

typedef enum { DDS_REAL = 0, DDS_COMPLEX = 1 } dds_field;

typedef enum { DDS_METHOD_DD = 0, DDS_METHOD_BASELINE = 1 } dds_method;

/* Symmetric sparse matrix (lower triangle stored). */
typedef struct dds_matrix dds_matrix;
/* Dense row-major block; complex values are interleaved (re, im). */
typedef struct dds_dense dds_dense;
/* Factorization produced by either method. */
typedef struct dds_factor dds_factor;

typedef struct {
  int method;   /* dds_method */
  int n_parts;  /* <= 0 selects dds_default_parts(n) */
  int threads;  /* >= 1 */
} dds_options;

typedef struct {
  int32_t n;
  int64_t nnz;
  int32_t n_parts;
  int32_t n_interface;
  int32_t n_groups;
  int32_t perturbations;
  uint64_t peak_bytes;
  uint64_t retained_bytes;
  double factor_seconds;
  int32_t phase_count;
} dds_factor_stats;

typedef struct {
  double seconds;
  uint64_t peak_bytes;
} dds_solve_stats;

/* Message of the last failed call on this thread ("" if none). */
DDS_API const char* dds_last_error(void);
DDS_API const char* dds_version(void);

DDS_API int dds_matrix_load(const char* path, dds_matrix** out);
DDS_API int dds_matrix_save(const dds_matrix* m, const char* path);
/* Entries of either triangle; duplicates are summed. values holds count
   scalars (2 * count doubles for complex). */
DDS_API int dds_matrix_from_triplets(int32_t n, int field, int64_t count, const int32_t* rows,
                                     const int32_t* cols, const double* values,
                                     dds_matrix** out);
DDS_API int dds_matrix_info(const dds_matrix* m, int32_t* n, int64_t* nnz, int* field);
DDS_API void dds_matrix_free(dds_matrix* m);

DDS_API int dds_dense_create(int32_t rows, int32_t cols, int field, dds_dense** out);
DDS_API int dds_dense_load(const char* path, dds_dense** out);
DDS_API int dds_dense_save(const dds_dense* d, const char* path);
DDS_API int dds_dense_info(const dds_dense* d, int32_t* rows, int32_t* cols, int* field);
/* Row-major storage, rows * cols scalars. */
DDS_API double* dds_dense_values(dds_dense* d);
/* Columns [c0, c0 + width) as a new block. */
DDS_API int dds_dense_columns(const dds_dense* d, int32_t c0, int32_t width, dds_dense** out);
/* *equal = 1 if both blocks hold bit-identical values, else 0. */
DDS_API int dds_dense_equal(const dds_dense* a, const dds_dense* b, int* equal);
DDS_API void dds_dense_free(dds_dense* d);

/* Dielectric sphere in the unit cube, nodes per axis, eps_in = eps_re + i eps_im. */
DDS_API int dds_generate_sphere(int32_t nodes, double eps_re, double eps_im, double wavenumber,
                                int32_t rhs_count, uint64_t seed, dds_matrix** a,
                                dds_dense** rhs);
/* rows x cols point-source array on an nx x ny x nz node grid. */
DDS_API int dds_generate_array(int32_t rows, int32_t cols, int32_t spacing, int32_t nx, int32_t ny,
                               int32_t nz, double wavenumber, dds_matrix** a, dds_dense** rhs);
/* Seeded uniform [-1, 1) block. */
DDS_API int dds_random_dense(int32_t rows, int32_t cols, int field, uint64_t seed,
                             dds_dense** out);

DDS_API int32_t dds_default_parts(int32_t n);
DDS_API double dds_unit_cube_first_eigenvalue(void);

DDS_API int dds_factorize(const dds_matrix* a, const dds_options* opts, dds_factor** out);
DDS_API int dds_factor_stats_get(const dds_factor* f, dds_factor_stats* stats);
DDS_API int dds_factor_phase(const dds_factor* f, int32_t index, const char** name,
                             double* seconds, uint64_t* peak_bytes);
DDS_API int dds_solve(const dds_factor* f, const dds_dense* b, int threads, dds_dense** x,
                      dds_solve_stats* stats);
/* Writes the interface block structure as text. */
DDS_API int dds_factor_dump_interface(const dds_factor* f, const char* path);
DDS_API void dds_factor_free(dds_factor* f);

/* Per-column relative residual; out holds cols(b) doubles. */
DDS_API int dds_relative_residual(const dds_matrix* a, const dds_dense* x, const dds_dense* b,
                                  double* out);

#ifdef __cplusplus
}
#endif

#endif
