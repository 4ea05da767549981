#include "gnwave/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gnwave::kernels {

namespace {

std::atomic<bool> g_parallel{true};

inline bool go_parallel(std::size_t n) {
#ifdef _OPENMP
  return g_parallel.load(std::memory_order_relaxed) && n >= grain && omp_get_max_threads() > 1;
#else
  (void)n;
  return false;
#endif
}

} // namespace

bool parallel_enabled() { return g_parallel.load(std::memory_order_relaxed); }
void set_parallel(bool on) { g_parallel.store(on, std::memory_order_relaxed); }

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void scale_add_ref(std::size_t n, double a, const double* x, double b, const double* y, double* w) {
  for (std::size_t i = 0; i < n; ++i)
    w[i] = a * x[i] + b * y[i];
}

void scale_add_omp(std::size_t n, double a, const double* x, double b, const double* y, double* w) {
#ifdef _OPENMP
#pragma omp parallel for
  for (long long i = 0; i < (long long)n; ++i)
    w[i] = a * x[i] + b * y[i];
#else
  scale_add_ref(n, a, x, b, y, w);
#endif
}

void scale_add(std::size_t n, double a, const double* x, double b, const double* y, double* w) {
  if (go_parallel(n))
    scale_add_omp(n, a, x, b, y, w);
  else
    scale_add_ref(n, a, x, b, y, w);
}

void axpy_ref(std::size_t n, double a, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i)
    y[i] += a * x[i];
}

void axpy_omp(std::size_t n, double a, const double* x, double* y) {
#ifdef _OPENMP
#pragma omp parallel for
  for (long long i = 0; i < (long long)n; ++i)
    y[i] += a * x[i];
#else
  axpy_ref(n, a, x, y);
#endif
}

void axpy(std::size_t n, double a, const double* x, double* y) {
  if (go_parallel(n))
    axpy_omp(n, a, x, y);
  else
    axpy_ref(n, a, x, y);
}

void mul_ref(std::size_t n, const double* x, const double* y, double* w) {
  for (std::size_t i = 0; i < n; ++i)
    w[i] = x[i] * y[i];
}

void mul_omp(std::size_t n, const double* x, const double* y, double* w) {
#ifdef _OPENMP
#pragma omp parallel for
  for (long long i = 0; i < (long long)n; ++i)
    w[i] = x[i] * y[i];
#else
  mul_ref(n, x, y, w);
#endif
}

void mul(std::size_t n, const double* x, const double* y, double* w) {
  if (go_parallel(n))
    mul_omp(n, x, y, w);
  else
    mul_ref(n, x, y, w);
}

void rk4_combine_ref(std::size_t n, const double* x0, double c, const double* k1,
                     const double* k2, const double* k3, const double* k4, double* y) {
  for (std::size_t i = 0; i < n; ++i)
    y[i] = x0[i] + c * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

void rk4_combine_omp(std::size_t n, const double* x0, double c, const double* k1,
                     const double* k2, const double* k3, const double* k4, double* y) {
#ifdef _OPENMP
#pragma omp parallel for
  for (long long i = 0; i < (long long)n; ++i)
    y[i] = x0[i] + c * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
#else
  rk4_combine_ref(n, x0, c, k1, k2, k3, k4, y);
#endif
}

void rk4_combine(std::size_t n, const double* x0, double c, const double* k1,
                 const double* k2, const double* k3, const double* k4, double* y) {
  if (go_parallel(n))
    rk4_combine_omp(n, x0, c, k1, k2, k3, k4, y);
  else
    rk4_combine_ref(n, x0, c, k1, k2, k3, k4, y);
}

// Both reduction variants accumulate per chunk and then fold the chunk
// partials in index order, so the rounding sequence is identical.

namespace {

inline double sum_chunk(std::size_t lo, std::size_t hi, const double* x) {
  double s = 0.0;
  for (std::size_t i = lo; i < hi; ++i)
    s += x[i];
  return s;
}

inline double dot_chunk(std::size_t lo, std::size_t hi, const double* x, const double* y) {
  double s = 0.0;
  for (std::size_t i = lo; i < hi; ++i)
    s += x[i] * y[i];
  return s;
}

inline std::size_t chunk_count(std::size_t n) { return (n + chunk - 1) / chunk; }

} // namespace

double sum_ref(std::size_t n, const double* x) {
  const std::size_t nc = chunk_count(n);
  double s = 0.0;
  for (std::size_t c = 0; c < nc; ++c)
    s += sum_chunk(c * chunk, std::min(n, (c + 1) * chunk), x);
  return s;
}

double sum_omp(std::size_t n, const double* x) {
#ifdef _OPENMP
  const std::size_t nc = chunk_count(n);
  std::vector<double> partial(nc);
#pragma omp parallel for schedule(static)
  for (long long c = 0; c < (long long)nc; ++c)
    partial[c] = sum_chunk((std::size_t)c * chunk, std::min(n, ((std::size_t)c + 1) * chunk), x);
  double s = 0.0;
  for (std::size_t c = 0; c < nc; ++c)
    s += partial[c];
  return s;
#else
  return sum_ref(n, x);
#endif
}

double sum(std::size_t n, const double* x) {
  return go_parallel(n) ? sum_omp(n, x) : sum_ref(n, x);
}

double dot_ref(std::size_t n, const double* x, const double* y) {
  const std::size_t nc = chunk_count(n);
  double s = 0.0;
  for (std::size_t c = 0; c < nc; ++c)
    s += dot_chunk(c * chunk, std::min(n, (c + 1) * chunk), x, y);
  return s;
}

double dot_omp(std::size_t n, const double* x, const double* y) {
#ifdef _OPENMP
  const std::size_t nc = chunk_count(n);
  std::vector<double> partial(nc);
#pragma omp parallel for schedule(static)
  for (long long c = 0; c < (long long)nc; ++c)
    partial[c] = dot_chunk((std::size_t)c * chunk, std::min(n, ((std::size_t)c + 1) * chunk), x, y);
  double s = 0.0;
  for (std::size_t c = 0; c < nc; ++c)
    s += partial[c];
  return s;
#else
  return dot_ref(n, x, y);
#endif
}

double dot(std::size_t n, const double* x, const double* y) {
  return go_parallel(n) ? dot_omp(n, x, y) : dot_ref(n, x, y);
}

double max_abs_ref(std::size_t n, const double* x) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    m = std::max(m, std::fabs(x[i]));
  return m;
}

double max_abs_omp(std::size_t n, const double* x) {
#ifdef _OPENMP
  double m = 0.0;
#pragma omp parallel for reduction(max : m)
  for (long long i = 0; i < (long long)n; ++i)
    m = std::max(m, std::fabs(x[i]));
  return m;
#else
  return max_abs_ref(n, x);
#endif
}

double max_abs(std::size_t n, const double* x) {
  return go_parallel(n) ? max_abs_omp(n, x) : max_abs_ref(n, x);
}

void apply_real_symbol_ref(std::size_t m, const double* s, std::complex<double>* z) {
  for (std::size_t j = 0; j < m; ++j)
    z[j] *= s[j];
}

void apply_real_symbol_omp(std::size_t m, const double* s, std::complex<double>* z) {
#ifdef _OPENMP
#pragma omp parallel for
  for (long long j = 0; j < (long long)m; ++j)
    z[j] *= s[j];
#else
  apply_real_symbol_ref(m, s, z);
#endif
}

void apply_real_symbol(std::size_t m, const double* s, std::complex<double>* z) {
  if (go_parallel(m))
    apply_real_symbol_omp(m, s, z);
  else
    apply_real_symbol_ref(m, s, z);
}

void apply_imag_symbol_ref(std::size_t m, const double* s, std::complex<double>* z) {
  for (std::size_t j = 0; j < m; ++j)
    z[j] = std::complex<double>(-s[j] * z[j].imag(), s[j] * z[j].real());
}

void apply_imag_symbol_omp(std::size_t m, const double* s, std::complex<double>* z) {
#ifdef _OPENMP
#pragma omp parallel for
  for (long long j = 0; j < (long long)m; ++j)
    z[j] = std::complex<double>(-s[j] * z[j].imag(), s[j] * z[j].real());
#else
  apply_imag_symbol_ref(m, s, z);
#endif
}

void apply_imag_symbol(std::size_t m, const double* s, std::complex<double>* z) {
  if (go_parallel(m))
    apply_imag_symbol_omp(m, s, z);
  else
    apply_imag_symbol_ref(m, s, z);
}

void rank1_update_ref(double* a, std::size_t lda, std::size_t kcol, std::size_t n) {
  const double* prow = a + kcol * lda;
  for (std::size_t i = kcol + 1; i < n; ++i) {
    double* row = a + i * lda;
    const double mult = row[kcol];
    if (mult == 0.0)
      continue;
    for (std::size_t j = kcol + 1; j < n; ++j)
      row[j] -= mult * prow[j];
  }
}

void rank1_update_omp(double* a, std::size_t lda, std::size_t kcol, std::size_t n) {
#ifdef _OPENMP
  const double* prow = a + kcol * lda;
#pragma omp parallel for schedule(static)
  for (long long i = (long long)kcol + 1; i < (long long)n; ++i) {
    double* row = a + (std::size_t)i * lda;
    const double mult = row[kcol];
    if (mult == 0.0)
      continue;
    for (std::size_t j = kcol + 1; j < n; ++j)
      row[j] -= mult * prow[j];
  }
#else
  rank1_update_ref(a, lda, kcol, n);
#endif
}

void rank1_update(double* a, std::size_t lda, std::size_t kcol, std::size_t n) {
  const std::size_t rows = n > kcol + 1 ? n - kcol - 1 : 0;
  if (parallel_enabled() && rows * rows >= grain && max_threads() > 1)
    rank1_update_omp(a, lda, kcol, n);
  else
    rank1_update_ref(a, lda, kcol, n);
}

} // namespace gnwave::kernels
