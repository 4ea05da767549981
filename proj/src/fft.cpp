#include "gnwave/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace gnwave::spectral {

namespace {
// the FFTW planner is not thread safe
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
} // namespace

Fft::Fft(int n) : n_(n) {
  if (n < 4 || n % 2 != 0)
    throw std::invalid_argument("Fft: size must be even and at least 4");
  rproto_ = fftw_alloc_real(n_);
  fftw_complex* c = fftw_alloc_complex(n_ / 2 + 1);
  cproto_ = c;
  for (int i = 0; i < n_; ++i)
    rproto_[i] = 0.0;
  std::lock_guard<std::mutex> lock(planner_mutex());
  // FFTW_UNALIGNED lets the new-array execute calls run on any buffer;
  // FFTW_PRESERVE_INPUT keeps spectra intact across inverse transforms.
  fwd_ = fftw_plan_dft_r2c_1d(n_, rproto_, c, FFTW_ESTIMATE | FFTW_UNALIGNED);
  inv_ = fftw_plan_dft_c2r_1d(n_, c, rproto_, FFTW_ESTIMATE | FFTW_UNALIGNED | FFTW_PRESERVE_INPUT);
  if (!fwd_ || !inv_)
    throw std::runtime_error("Fft: plan creation failed");
}

Fft::~Fft() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(inv_));
  fftw_free(rproto_);
  fftw_free(static_cast<fftw_complex*>(cproto_));
}

void Fft::forward(const double* in, cplx* out) const {
  fftw_execute_dft_r2c(static_cast<fftw_plan>(fwd_), const_cast<double*>(in),
                       reinterpret_cast<fftw_complex*>(out));
  const double scale = 1.0 / n_;
  const int m = modes();
  for (int j = 0; j < m; ++j)
    out[j] *= scale;
}

void Fft::inverse(const cplx* in, double* out) const {
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inv_),
                       reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)), out);
}

} // namespace gnwave::spectral
