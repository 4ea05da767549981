#ifndef GNWAVE_KERNELS_HPP
#define GNWAVE_KERNELS_HPP

#include <complex>
#include <cstddef>

// Array kernels used by the spectral solvers. Each kernel has a serial
// reference implementation (suffix _ref) and an OpenMP variant (_omp).
// The unsuffixed entry points dispatch at runtime: the OpenMP variant is
// used when parallel execution is enabled and the problem is large enough
// to amortize the fork/join cost. Reductions are chunked with a fixed
// chunk size and combined in chunk order, so serial and parallel runs
// produce bitwise identical results for any thread count.

namespace gnwave::kernels {

inline constexpr std::size_t grain = 1u << 14;
inline constexpr std::size_t chunk = 1u << 12;

bool parallel_enabled();
void set_parallel(bool on);
int max_threads();

// w = a*x + b*y
void scale_add_ref(std::size_t n, double a, const double* x, double b, const double* y, double* w);
void scale_add_omp(std::size_t n, double a, const double* x, double b, const double* y, double* w);
void scale_add(std::size_t n, double a, const double* x, double b, const double* y, double* w);

// y += a*x
void axpy_ref(std::size_t n, double a, const double* x, double* y);
void axpy_omp(std::size_t n, double a, const double* x, double* y);
void axpy(std::size_t n, double a, const double* x, double* y);

// w = x .* y
void mul_ref(std::size_t n, const double* x, const double* y, double* w);
void mul_omp(std::size_t n, const double* x, const double* y, double* w);
void mul(std::size_t n, const double* x, const double* y, double* w);

// y = x0 + c*(k1 + 2*k2 + 2*k3 + k4)
void rk4_combine_ref(std::size_t n, const double* x0, double c, const double* k1,
                     const double* k2, const double* k3, const double* k4, double* y);
void rk4_combine_omp(std::size_t n, const double* x0, double c, const double* k1,
                     const double* k2, const double* k3, const double* k4, double* y);
void rk4_combine(std::size_t n, const double* x0, double c, const double* k1,
                 const double* k2, const double* k3, const double* k4, double* y);

// chunked reductions
double sum_ref(std::size_t n, const double* x);
double sum_omp(std::size_t n, const double* x);
double sum(std::size_t n, const double* x);

double dot_ref(std::size_t n, const double* x, const double* y);
double dot_omp(std::size_t n, const double* x, const double* y);
double dot(std::size_t n, const double* x, const double* y);

double max_abs_ref(std::size_t n, const double* x);
double max_abs_omp(std::size_t n, const double* x);
double max_abs(std::size_t n, const double* x);

// z[j] *= s[j] for a complex array and a real symbol
void apply_real_symbol_ref(std::size_t m, const double* s, std::complex<double>* z);
void apply_real_symbol_omp(std::size_t m, const double* s, std::complex<double>* z);
void apply_real_symbol(std::size_t m, const double* s, std::complex<double>* z);

// z[j] *= i*s[j] (multiplication by an imaginary odd symbol)
void apply_imag_symbol_ref(std::size_t m, const double* s, std::complex<double>* z);
void apply_imag_symbol_omp(std::size_t m, const double* s, std::complex<double>* z);
void apply_imag_symbol(std::size_t m, const double* s, std::complex<double>* z);

// trailing-submatrix update of an LU factorization step:
// a[i][j] -= a[i][kcol] * a[kcol][j] for i,j > kcol, row-major with stride lda.
// The pivot column a[i][kcol] must already hold the multipliers.
void rank1_update_ref(double* a, std::size_t lda, std::size_t kcol, std::size_t n);
void rank1_update_omp(double* a, std::size_t lda, std::size_t kcol, std::size_t n);
void rank1_update(double* a, std::size_t lda, std::size_t kcol, std::size_t n);

} // namespace gnwave::kernels

#endif
