#include "ddsolver/ddsolver.h"

#include <cstring>
#include <fstream>
#include <new>
#include <random>
#include <string>
#include <variant>

#include "ddsolver/driver.hpp"
#include "ddsolver/matrix_market.hpp"
#include "ddsolver/problem.hpp"

using namespace dds;

struct dds_matrix {
  AnySymMatrix m;
};

struct dds_dense {
  AnyDense d;
};

struct dds_factor {
  std::variant<DDFactor<double>, DDFactor<cdouble>, BaselineFactor<double>,
               BaselineFactor<cdouble>>
      f;
};

namespace {

thread_local std::string g_last_error;

template <typename F>
int guard(F&& body) {
  try {
    body();
    g_last_error.clear();
    return DDS_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return static_cast<int>(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return DDS_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return DDS_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) throw Error(static_cast<ErrorCode>(DDS_ERR_NULL), std::string("null argument: ") + what);
}

int field_of(const AnyDense& d) { return d.index() == 0 ? DDS_REAL : DDS_COMPLEX; }

template <typename T>
const SolveStats& stats_of(const DDFactor<T>& f) {
  return f.stats;
}
template <typename T>
const SolveStats& stats_of(const BaselineFactor<T>& f) {
  return f.stats;
}

}  // namespace

extern "C" {

const char* dds_last_error(void) { return g_last_error.c_str(); }

const char* dds_version(void) { return "1.0.0"; }

int dds_matrix_load(const char* path, dds_matrix** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new dds_matrix{load_matrix_market_file(path)};
  });
}

int dds_matrix_save(const dds_matrix* m, const char* path) {
  return guard([&] {
    need(m, "matrix");
    need(path, "path");
    std::visit([&](const auto& a) { save_matrix_market_file(a, path); }, m->m);
  });
}

int dds_matrix_from_triplets(int32_t n, int field, int64_t count, const int32_t* rows,
                             const int32_t* cols, const double* values, dds_matrix** out) {
  return guard([&] {
    need(out, "out");
    require(n >= 0 && count >= 0, ErrorCode::kInvalidArgument, "negative size");
    if (count > 0) {
      need(rows, "rows");
      need(cols, "cols");
      need(values, "values");
    }
    for (int64_t k = 0; k < count; ++k)
      require(rows[k] >= 0 && rows[k] < n && cols[k] >= 0 && cols[k] < n,
              ErrorCode::kInvalidArgument, "triplet index out of range");
    if (field == DDS_REAL) {
      std::vector<Triplet<double>> t(count);
      for (int64_t k = 0; k < count; ++k) t[k] = {rows[k], cols[k], values[k]};
      *out = new dds_matrix{from_triplets<double>(n, t)};
    } else if (field == DDS_COMPLEX) {
      std::vector<Triplet<cdouble>> t(count);
      for (int64_t k = 0; k < count; ++k)
        t[k] = {rows[k], cols[k], cdouble(values[2 * k], values[2 * k + 1])};
      *out = new dds_matrix{from_triplets<cdouble>(n, t)};
    } else {
      fail(ErrorCode::kInvalidArgument, "unknown field");
    }
  });
}

int dds_matrix_info(const dds_matrix* m, int32_t* n, int64_t* nnz, int* field) {
  return guard([&] {
    need(m, "matrix");
    std::visit(
        [&](const auto& a) {
          if (n) *n = a.n;
          if (nnz) *nnz = a.nnz();
        },
        m->m);
    if (field) *field = m->m.index() == 0 ? DDS_REAL : DDS_COMPLEX;
  });
}

void dds_matrix_free(dds_matrix* m) { delete m; }

int dds_dense_create(int32_t rows, int32_t cols, int field, dds_dense** out) {
  return guard([&] {
    need(out, "out");
    if (field == DDS_REAL)
      *out = new dds_dense{DenseMatrix<double>(rows, cols)};
    else if (field == DDS_COMPLEX)
      *out = new dds_dense{DenseMatrix<cdouble>(rows, cols)};
    else
      fail(ErrorCode::kInvalidArgument, "unknown field");
  });
}

int dds_dense_load(const char* path, dds_dense** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new dds_dense{load_dense_matrix_market_file(path)};
  });
}

int dds_dense_save(const dds_dense* d, const char* path) {
  return guard([&] {
    need(d, "dense");
    need(path, "path");
    std::visit([&](const auto& m) { save_dense_matrix_market_file(m, path); }, d->d);
  });
}

int dds_dense_info(const dds_dense* d, int32_t* rows, int32_t* cols, int* field) {
  return guard([&] {
    need(d, "dense");
    std::visit(
        [&](const auto& m) {
          if (rows) *rows = m.rows();
          if (cols) *cols = m.cols();
        },
        d->d);
    if (field) *field = field_of(d->d);
  });
}

double* dds_dense_values(dds_dense* d) {
  if (!d) return nullptr;
  return std::visit([](auto& m) { return reinterpret_cast<double*>(m.data()); }, d->d);
}

int dds_dense_columns(const dds_dense* d, int32_t c0, int32_t width, dds_dense** out) {
  return guard([&] {
    need(d, "dense");
    need(out, "out");
    std::visit(
        [&](const auto& m) {
          require(c0 >= 0 && width >= 0 && c0 + width <= m.cols(), ErrorCode::kDimensionMismatch,
                  "column range out of bounds");
          *out = new dds_dense{m.column_block(c0, width)};
        },
        d->d);
  });
}

int dds_dense_equal(const dds_dense* a, const dds_dense* b, int* equal) {
  return guard([&] {
    need(a, "a");
    need(b, "b");
    need(equal, "equal");
    *equal = 0;
    if (a->d.index() != b->d.index()) return;
    std::visit(
        [&](const auto& x) {
          const auto& y = std::get<std::decay_t<decltype(x)>>(b->d);
          if (x.rows() == y.rows() && x.cols() == y.cols() &&
              (x.size() == 0 || std::memcmp(x.data(), y.data(), x.size() * sizeof(*x.data())) == 0))
            *equal = 1;
        },
        a->d);
  });
}

void dds_dense_free(dds_dense* d) { delete d; }

int dds_generate_sphere(int32_t nodes, double eps_re, double eps_im, double wavenumber,
                        int32_t rhs_count, uint64_t seed, dds_matrix** a, dds_dense** rhs) {
  return guard([&] {
    need(a, "a");
    need(rhs, "rhs");
    if (eps_im == 0.0) {
      auto p = sphere_problem<double>(nodes, eps_re, wavenumber, rhs_count, seed);
      *a = new dds_matrix{std::move(p.system.a)};
      *rhs = new dds_dense{std::move(p.rhs)};
    } else {
      auto p = sphere_problem<cdouble>(nodes, cdouble(eps_re, eps_im), wavenumber, rhs_count, seed);
      *a = new dds_matrix{std::move(p.system.a)};
      *rhs = new dds_dense{std::move(p.rhs)};
    }
  });
}

int dds_generate_array(int32_t rows, int32_t cols, int32_t spacing, int32_t nx, int32_t ny,
                       int32_t nz, double wavenumber, dds_matrix** a, dds_dense** rhs) {
  return guard([&] {
    need(a, "a");
    need(rhs, "rhs");
    auto p = array_problem<double>(rows, cols, spacing, nx, ny, nz, wavenumber);
    *a = new dds_matrix{std::move(p.system.a)};
    *rhs = new dds_dense{std::move(p.rhs)};
  });
}

int dds_random_dense(int32_t rows, int32_t cols, int field, uint64_t seed, dds_dense** out) {
  return guard([&] {
    need(out, "out");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    if (field == DDS_REAL) {
      DenseMatrix<double> m(rows, cols);
      for (auto& v : m.values()) v = u(rng);
      *out = new dds_dense{std::move(m)};
    } else if (field == DDS_COMPLEX) {
      DenseMatrix<cdouble> m(rows, cols);
      for (auto& v : m.values()) {
        const double re = u(rng);
        v = cdouble(re, u(rng));
      }
      *out = new dds_dense{std::move(m)};
    } else {
      fail(ErrorCode::kInvalidArgument, "unknown field");
    }
  });
}

int32_t dds_default_parts(int32_t n) { return default_parts(n); }

double dds_unit_cube_first_eigenvalue(void) { return unit_cube_first_eigenvalue(); }

int dds_factorize(const dds_matrix* a, const dds_options* opts, dds_factor** out) {
  return guard([&] {
    need(a, "matrix");
    need(opts, "options");
    need(out, "out");
    require(opts->threads >= 1, ErrorCode::kInvalidArgument, "threads must be >= 1");
    std::visit(
        [&](const auto& m) {
          using T = typename std::decay_t<decltype(m.values)>::value_type;
          if (opts->method == DDS_METHOD_DD) {
            const Index parts = opts->n_parts > 0 ? opts->n_parts : default_parts(m.n);
            *out = new dds_factor{dd_factor<T>(m, parts, opts->threads)};
          } else if (opts->method == DDS_METHOD_BASELINE) {
            *out = new dds_factor{baseline_factor<T>(m)};
          } else {
            fail(ErrorCode::kInvalidArgument, "unknown method");
          }
        },
        a->m);
  });
}

int dds_factor_stats_get(const dds_factor* f, dds_factor_stats* stats) {
  return guard([&] {
    need(f, "factor");
    need(stats, "stats");
    std::visit(
        [&](const auto& x) {
          const SolveStats& s = stats_of(x);
          stats->n = s.n;
          stats->nnz = s.nnz;
          stats->n_parts = s.n_parts;
          stats->n_interface = s.n_interface;
          stats->n_groups = s.n_groups;
          stats->perturbations = s.perturbations;
          stats->peak_bytes = s.peak_bytes;
          stats->retained_bytes = x.bytes;
          stats->factor_seconds = s.total_seconds();
          stats->phase_count = static_cast<int32_t>(s.phases.size());
        },
        f->f);
  });
}

int dds_factor_phase(const dds_factor* f, int32_t index, const char** name, double* seconds,
                     uint64_t* peak_bytes) {
  return guard([&] {
    need(f, "factor");
    std::visit(
        [&](const auto& x) {
          const SolveStats& s = stats_of(x);
          require(index >= 0 && index < static_cast<int32_t>(s.phases.size()),
                  ErrorCode::kInvalidArgument, "phase index out of range");
          if (name) *name = s.phases[index].name.c_str();
          if (seconds) *seconds = s.phases[index].seconds;
          if (peak_bytes) *peak_bytes = s.phases[index].peak_bytes;
        },
        f->f);
  });
}

int dds_solve(const dds_factor* f, const dds_dense* b, int threads, dds_dense** x,
              dds_solve_stats* stats) {
  return guard([&] {
    need(f, "factor");
    need(b, "rhs");
    need(x, "x");
    require(threads >= 1, ErrorCode::kInvalidArgument, "threads must be >= 1");
    SolveStats st;
    std::visit(
        [&](const auto& fac) {
          using F = std::decay_t<decltype(fac)>;
          using T = std::conditional_t<std::is_same_v<F, DDFactor<double>> ||
                                           std::is_same_v<F, BaselineFactor<double>>,
                                       double, cdouble>;
          const auto* rhs = std::get_if<DenseMatrix<T>>(&b->d);
          require(rhs != nullptr, ErrorCode::kInvalidArgument,
                  "right-hand side field differs from the matrix field");
          if constexpr (std::is_same_v<F, DDFactor<T>>)
            *x = new dds_dense{dd_solve(fac, *rhs, &st, threads)};
          else
            *x = new dds_dense{baseline_solve(fac, *rhs, &st)};
        },
        f->f);
    if (stats) {
      stats->seconds = st.total_seconds();
      stats->peak_bytes = st.peak_bytes;
    }
  });
}

int dds_factor_dump_interface(const dds_factor* f, const char* path) {
  return guard([&] {
    need(f, "factor");
    need(path, "path");
    std::ofstream out(path);
    if (!out) fail(ErrorCode::kIo, std::string("cannot open ") + path);
    std::visit(
        [&](const auto& x) {
          using F = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<F, DDFactor<double>> || std::is_same_v<F, DDFactor<cdouble>>)
            out << x.interface_summary;
          else
            out << "groups 0 n 0 blocks 0 of 0 density 0\nfill_blocks 0\n";
        },
        f->f);
    if (!out) fail(ErrorCode::kIo, std::string("write failed: ") + path);
  });
}

void dds_factor_free(dds_factor* f) { delete f; }

int dds_relative_residual(const dds_matrix* a, const dds_dense* x, const dds_dense* b,
                          double* out) {
  return guard([&] {
    need(a, "matrix");
    need(x, "x");
    need(b, "b");
    need(out, "out");
    std::visit(
        [&](const auto& m) {
          using T = typename std::decay_t<decltype(m.values)>::value_type;
          const auto* xx = std::get_if<DenseMatrix<T>>(&x->d);
          const auto* bb = std::get_if<DenseMatrix<T>>(&b->d);
          require(xx && bb, ErrorCode::kInvalidArgument, "field mismatch");
          const auto r = relative_residual(m, *xx, *bb);
          std::copy(r.begin(), r.end(), out);
        },
        a->m);
  });
}

}  // extern "C"
