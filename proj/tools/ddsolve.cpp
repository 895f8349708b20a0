// ddsolve: generate benchmark systems, solve Matrix Market files, and sweep
// dd against the baseline factorization.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ddsolver/ddsolver.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitError = 1;
constexpr int kExitResidual = 3;

constexpr const char* kCsvHeader =
    "problem,n,nnz,n_parts,n_interface,rhs,method,phase,peak_mem_bytes,wall_s,relres_max,"
    "pert_flags,status";

struct MatrixDel {
  void operator()(dds_matrix* p) const { dds_matrix_free(p); }
};
struct DenseDel {
  void operator()(dds_dense* p) const { dds_dense_free(p); }
};
struct FactorDel {
  void operator()(dds_factor* p) const { dds_factor_free(p); }
};
using Matrix = std::unique_ptr<dds_matrix, MatrixDel>;
using Dense = std::unique_ptr<dds_dense, DenseDel>;
using Factor = std::unique_ptr<dds_factor, FactorDel>;

void check(int status) {
  if (status != DDS_OK) throw std::runtime_error(dds_last_error());
}

struct Config {
  std::string problem = "sphere";
  std::vector<int> sizes;
  std::vector<std::string> files;
  std::string parts = "auto";
  std::optional<int> rhs;
  double wavenumber = 0.0;
  double eps_contrast = 4.0;
  double eps_loss = 0.0;
  std::string method = "both";
  std::optional<int> threads;
  std::uint64_t seed = 1;
  std::string out;
  std::string plot_data;
  int repeat = 1;
  std::optional<double> tol;
  bool split_phases = false;
  int array_rows = 10;
  int array_cols = 20;
  int array_spacing = 1;
};

int resolve_threads(const Config& c) {
  if (c.threads) return *c.threads;
  if (const char* env = std::getenv("DD_SOLVER_THREADS")) {
    try {
      const int t = std::stoi(env);
      if (t >= 1) return t;
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring DD_SOLVER_THREADS=" << env << "\n";
  }
  return 1;
}

double resolve_tol(const Config& c) {
  if (c.tol) return *c.tol;
  return c.wavenumber == 0.0 ? 1e-10 : 1e-8;
}

int resolve_parts(const Config& c, int n) {
  if (c.parts == "auto") return dds_default_parts(n);
  return std::stoi(c.parts);
}

std::vector<int> methods_of(const std::string& m) {
  if (m == "dd") return {DDS_METHOD_DD};
  if (m == "baseline") return {DDS_METHOD_BASELINE};
  return {DDS_METHOD_DD, DDS_METHOD_BASELINE};
}

const char* method_name(int m) { return m == DDS_METHOD_DD ? "dd" : "baseline"; }

struct Point {
  std::string label;
  Matrix a;
  Dense b;
};

Point generate(const Config& c, int size) {
  Point p;
  dds_matrix* a = nullptr;
  dds_dense* b = nullptr;
  if (c.problem == "sphere") {
    p.label = "sphere_" + std::to_string(size);
    check(dds_generate_sphere(size, c.eps_contrast, c.eps_loss, c.wavenumber, c.rhs.value_or(200),
                              c.seed, &a, &b));
  } else {
    p.label = "array_" + std::to_string(size);
    check(dds_generate_array(c.array_rows, c.array_cols, c.array_spacing, size, size, size,
                             c.wavenumber, &a, &b));
  }
  p.a.reset(a);
  p.b.reset(b);
  if (c.problem == "array" && c.rhs) {
    int32_t cols = 0;
    check(dds_dense_info(p.b.get(), nullptr, &cols, nullptr));
    if (*c.rhs < cols) {
      dds_dense* sub = nullptr;
      check(dds_dense_columns(p.b.get(), 0, *c.rhs, &sub));
      p.b.reset(sub);
    }
  }
  return p;
}

std::string rhs_path_for(const std::string& matrix_path) {
  const fs::path p(matrix_path);
  return (p.parent_path() / (p.stem().string() + "_rhs.mtx")).string();
}

// Right-hand side next to the matrix (<stem>_rhs.mtx) or seeded random columns.
Dense load_or_random_rhs(const Config& c, const dds_matrix* a, const std::string& matrix_path,
                         const std::string& explicit_rhs) {
  dds_dense* b = nullptr;
  std::string path = explicit_rhs;
  if (path.empty() && fs::exists(rhs_path_for(matrix_path))) path = rhs_path_for(matrix_path);
  if (!path.empty()) {
    check(dds_dense_load(path.c_str(), &b));
    return Dense(b);
  }
  int32_t n = 0;
  int field = 0;
  check(dds_matrix_info(a, &n, nullptr, &field));
  check(dds_random_dense(n, c.rhs.value_or(1), field, c.seed, &b));
  return Dense(b);
}

Point load_point(const Config& c, const std::string& path) {
  Point p;
  dds_matrix* a = nullptr;
  check(dds_matrix_load(path.c_str(), &a));
  p.a.reset(a);
  p.label = fs::path(path).stem().string();
  p.b = load_or_random_rhs(c, p.a.get(), path, "");
  return p;
}

struct Phase {
  std::string name;
  double seconds = 0.0;
  std::uint64_t peak = 0;
};

struct Run {
  dds_factor_stats fs{};
  std::vector<Phase> phases;
  double factor_s = 0.0;
  double solve_s = 0.0;
  std::uint64_t solve_peak = 0;
  double relres_max = 0.0;
  Dense x;
};

double wall_seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Run run_method(const dds_matrix* a, const dds_dense* b, int method, int parts, int threads,
               int repeat) {
  Run best;
  for (int r = 0; r < repeat; ++r) {
    Run cur;
    dds_options opts{method, parts, threads};
    dds_factor* f = nullptr;
    auto t0 = std::chrono::steady_clock::now();
    check(dds_factorize(a, &opts, &f));
    cur.factor_s = wall_seconds(t0);
    Factor fac(f);
    check(dds_factor_stats_get(fac.get(), &cur.fs));
    for (int32_t i = 0; i < cur.fs.phase_count; ++i) {
      const char* name = nullptr;
      Phase ph;
      check(dds_factor_phase(fac.get(), i, &name, &ph.seconds, &ph.peak));
      ph.name = name;
      cur.phases.push_back(ph);
    }
    dds_dense* x = nullptr;
    dds_solve_stats ss{};
    t0 = std::chrono::steady_clock::now();
    check(dds_solve(fac.get(), b, threads, &x, &ss));
    cur.solve_s = wall_seconds(t0);
    cur.solve_peak = ss.peak_bytes;
    cur.x.reset(x);
    cur.phases.push_back({"solve", cur.solve_s, ss.peak_bytes});
    int32_t cols = 0;
    check(dds_dense_info(b, nullptr, &cols, nullptr));
    std::vector<double> res(cols);
    check(dds_relative_residual(a, cur.x.get(), b, res.data()));
    for (double v : res) cur.relres_max = std::max(cur.relres_max, v);
    if (r == 0 || cur.factor_s + cur.solve_s < best.factor_s + best.solve_s) best = std::move(cur);
  }
  return best;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Row {
  std::string problem;
  int32_t n = 0;
  int64_t nnz = 0;
  int32_t n_parts = 0;
  int32_t n_interface = 0;
  int32_t rhs = 0;
  std::string method;
  std::string phase;
  std::uint64_t peak = 0;
  double wall = 0.0;
  double relres = 0.0;
  int32_t pert = 0;
  std::string status;
};

std::string csv_line(const Row& r) {
  std::ostringstream s;
  s << r.problem << ',' << r.n << ',' << r.nnz << ',' << r.n_parts << ',' << r.n_interface << ','
    << r.rhs << ',' << r.method << ',' << r.phase << ',' << r.peak << ','
    << fmt("%.6f", r.wall) << ',' << fmt("%.6e", r.relres) << ',' << r.pert << ',' << r.status;
  return s.str();
}

std::vector<Row> rows_for(const std::string& problem, const Run& run, int32_t rhs,
                          const char* method, double tol, bool split) {
  Row base;
  base.problem = problem;
  base.n = run.fs.n;
  base.nnz = run.fs.nnz;
  base.n_parts = run.fs.n_parts;
  base.n_interface = run.fs.n_interface;
  base.rhs = rhs;
  base.method = method;
  base.relres = run.relres_max;
  base.pert = run.fs.perturbations;
  base.status = run.relres_max <= tol ? "ok" : "residual";
  std::vector<Row> rows;
  if (split) {
    for (const auto& ph : run.phases) {
      Row r = base;
      r.phase = ph.name;
      r.peak = ph.peak;
      r.wall = ph.seconds;
      rows.push_back(r);
    }
  }
  Row total = base;
  total.phase = "total";
  total.peak = std::max<std::uint64_t>(run.fs.peak_bytes, run.solve_peak);
  total.wall = run.factor_s + run.solve_s;
  rows.push_back(total);
  return rows;
}

Row error_row(const std::string& problem, const char* method, int32_t rhs) {
  Row r;
  r.problem = problem;
  r.rhs = rhs;
  r.method = method;
  r.phase = "total";
  r.status = "error";
  return r;
}

void write_dense(const dds_dense* d, const std::string& path) {
  check(dds_dense_save(d, path.c_str()));
}

int cmd_gen(const Config& c) {
  if (c.problem == "mtx") throw std::runtime_error("gen needs --problem sphere or array");
  const fs::path dir = c.out.empty() ? fs::path(".") : fs::path(c.out);
  fs::create_directories(dir);
  for (int size : c.sizes) {
    Point p = generate(c, size);
    const std::string a_path = (dir / (p.label + ".mtx")).string();
    check(dds_matrix_save(p.a.get(), a_path.c_str()));
    write_dense(p.b.get(), rhs_path_for(a_path));
    std::cout << a_path << "\n" << rhs_path_for(a_path) << "\n";
  }
  return 0;
}

int cmd_solve(const Config& c, const std::string& matrix, const std::string& rhs) {
  if (c.method == "both") throw std::runtime_error("solve takes --method dd or baseline");
  dds_matrix* a_raw = nullptr;
  check(dds_matrix_load(matrix.c_str(), &a_raw));
  Matrix a(a_raw);
  Dense b = load_or_random_rhs(c, a.get(), matrix, rhs);
  int32_t n = 0, cols = 0;
  check(dds_matrix_info(a.get(), &n, nullptr, nullptr));
  check(dds_dense_info(b.get(), nullptr, &cols, nullptr));
  const int method = methods_of(c.method).front();
  const int parts = method == DDS_METHOD_DD ? resolve_parts(c, n) : 1;
  Run run = run_method(a.get(), b.get(), method, parts, resolve_threads(c), c.repeat);
  if (!c.out.empty()) write_dense(run.x.get(), c.out);
  const double tol = resolve_tol(c);
  std::cout << kCsvHeader << "\n";
  for (const Row& r : rows_for(fs::path(matrix).stem().string(), run, cols, method_name(method),
                               tol, c.split_phases))
    std::cout << csv_line(r) << "\n";
  if (run.relres_max > tol) {
    std::cerr << "residual " << run.relres_max << " exceeds " << tol << "\n";
    return kExitResidual;
  }
  return 0;
}

struct PlotPoint {
  std::size_t point = 0;
  std::string problem;
  int32_t n = 0;
  int64_t nnz = 0;
  std::string method;
  std::uint64_t peak = 0;
  double factor_s = 0.0;
  double solve_s = 0.0;
};

int cmd_bench(const Config& c) {
  const int threads = resolve_threads(c);
  const double tol = resolve_tol(c);
  std::ofstream file;
  if (!c.out.empty()) {
    file.open(c.out);
    if (!file) throw std::runtime_error("cannot open " + c.out);
  }
  std::ostream& csv = c.out.empty() ? std::cout : file;
  csv << kCsvHeader << "\n";

  std::vector<PlotPoint> plot;
  const std::size_t count = c.problem == "mtx" ? c.files.size() : c.sizes.size();
  std::vector<double> ratios(count, std::numeric_limits<double>::quiet_NaN());
  int failures = 0;
  std::uint64_t last_peak[2] = {0, 0};
  for (std::size_t i = 0; i < count; ++i) {
    Point p;
    std::string label = c.problem == "mtx" ? fs::path(c.files[i]).stem().string()
                                           : c.problem + "_" + std::to_string(c.sizes[i]);
    try {
      p = c.problem == "mtx" ? load_point(c, c.files[i]) : generate(c, c.sizes[i]);
    } catch (const std::exception& e) {
      std::cerr << label << ": " << e.what() << "\n";
      for (int m : methods_of(c.method)) csv << csv_line(error_row(label, method_name(m), 0)) << "\n";
      ++failures;
      continue;
    }
    int32_t n = 0, cols = 0;
    check(dds_matrix_info(p.a.get(), &n, nullptr, nullptr));
    check(dds_dense_info(p.b.get(), nullptr, &cols, nullptr));
    std::uint64_t peaks[2] = {0, 0};
    for (int m : methods_of(c.method)) {
      const int parts = m == DDS_METHOD_DD ? resolve_parts(c, n) : 1;
      try {
        Run run = run_method(p.a.get(), p.b.get(), m, parts, threads, c.repeat);
        for (const Row& r : rows_for(p.label, run, cols, method_name(m), tol, c.split_phases))
          csv << csv_line(r) << "\n";
        if (run.relres_max > tol) ++failures;
        const std::uint64_t peak = std::max<std::uint64_t>(run.fs.peak_bytes, run.solve_peak);
        peaks[m] = peak;
        if (peak < last_peak[m])
          std::cerr << "warning: " << method_name(m) << " peak memory decreased at " << p.label
                    << "\n";
        last_peak[m] = peak;
        plot.push_back({i, p.label, run.fs.n, run.fs.nnz, method_name(m), peak, run.factor_s,
                        run.solve_s});
      } catch (const std::exception& e) {
        std::cerr << p.label << " " << method_name(m) << ": " << e.what() << "\n";
        csv << csv_line(error_row(p.label, method_name(m), cols)) << "\n";
        ++failures;
      }
      csv.flush();
    }
    ratios[i] = peaks[0] && peaks[1] ? static_cast<double>(peaks[0]) / peaks[1]
                                     : std::numeric_limits<double>::quiet_NaN();
  }

  if (!c.plot_data.empty()) {
    std::ofstream pd(c.plot_data);
    if (!pd) throw std::runtime_error("cannot open " + c.plot_data);
    pd << "# problem n nnz method peak_mem_bytes factor_s solve_s mem_ratio_dd_over_baseline\n";
    for (const auto& pp : plot) {
      const double ratio = ratios[pp.point];
      pd << pp.problem << ' ' << pp.n << ' ' << pp.nnz << ' ' << pp.method << ' ' << pp.peak
         << ' ' << fmt("%.6f", pp.factor_s) << ' ' << fmt("%.6f", pp.solve_s) << ' '
         << (std::isnan(ratio) ? std::string("nan") : fmt("%.6f", ratio)) << "\n";
    }
  }
  return failures ? kExitResidual : 0;
}

std::vector<int> parse_sizes(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stoi(tok));
  }
  return out;
}

void validate(const Config& c, bool need_sweep) {
  if (c.problem != "sphere" && c.problem != "array" && c.problem != "mtx")
    throw CLI::ValidationError("--problem", "must be sphere, array or mtx");
  if (c.method != "dd" && c.method != "baseline" && c.method != "both")
    throw CLI::ValidationError("--method", "must be dd, baseline or both");
  if (c.parts != "auto") {
    int v = 0;
    try {
      v = std::stoi(c.parts);
    } catch (const std::exception&) {
    }
    if (v < 1) throw CLI::ValidationError("--parts", "must be a positive integer or auto");
  }
  if (c.rhs && *c.rhs < 1) throw CLI::ValidationError("--rhs", "must be >= 1");
  if (c.threads && *c.threads < 1) throw CLI::ValidationError("--threads", "must be >= 1");
  if (c.repeat < 1) throw CLI::ValidationError("--repeat", "must be >= 1");
  if (need_sweep) {
    const bool empty = c.problem == "mtx" ? c.files.empty() : c.sizes.empty();
    if (empty) throw CLI::ValidationError("sweep", "--sizes or --files must be nonempty");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Domain decomposition direct solver benchmarks"};
  app.require_subcommand(1);
  Config c;
  std::string sizes = "16,22,28";
  std::string matrix_path, rhs_path;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--problem", c.problem, "sphere, array or mtx");
    sub->add_option("--sizes", sizes, "grid nodes per axis, comma separated");
    sub->add_option("--files", c.files, "Matrix Market systems (--problem mtx)");
    sub->add_option("--parts", c.parts, "subdomain count or auto");
    sub->add_option("--rhs", c.rhs, "right-hand side count");
    sub->add_option("--wavenumber", c.wavenumber, "Helmholtz wavenumber k");
    sub->add_option("--eps-contrast", c.eps_contrast, "sphere permittivity (real part)");
    sub->add_option("--eps-loss", c.eps_loss, "sphere permittivity (imaginary part)");
    sub->add_option("--method", c.method, "dd, baseline or both");
    sub->add_option("--threads", c.threads, "worker threads (default DD_SOLVER_THREADS or 1)");
    sub->add_option("--seed", c.seed, "generator seed");
    sub->add_option("--out", c.out, "output path");
    sub->add_option("--plot-data", c.plot_data, "whitespace separated plot data");
    sub->add_option("--repeat", c.repeat, "best-of-N timing");
    sub->add_option("--tol", c.tol, "residual threshold");
    sub->add_flag("--split-phases", c.split_phases, "one CSV row per phase");
    sub->add_option("--array-rows", c.array_rows, "source array rows");
    sub->add_option("--array-cols", c.array_cols, "source array columns");
    sub->add_option("--array-spacing", c.array_spacing, "source spacing in nodes");
  };

  auto* gen = app.add_subcommand("gen", "write matrix and rhs files per sweep point");
  common(gen);
  auto* solve = app.add_subcommand("solve", "solve one Matrix Market system");
  common(solve);
  solve->add_option("matrix", matrix_path, "system matrix")->required();
  solve->add_option("rhs_file", rhs_path, "right-hand sides (default <stem>_rhs.mtx or random)");
  auto* bench = app.add_subcommand("bench", "run the sweep and write CSV");
  common(bench);

  try {
    app.parse(argc, argv);
    c.sizes = parse_sizes(sizes);
    if (solve->parsed() && solve->count("--method") == 0) c.method = "dd";
    validate(c, !solve->parsed());
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (gen->parsed()) return cmd_gen(c);
    if (solve->parsed()) return cmd_solve(c, matrix_path, rhs_path);
    return cmd_bench(c);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}
