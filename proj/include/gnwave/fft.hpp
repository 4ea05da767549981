#ifndef GNWAVE_FFT_HPP
#define GNWAVE_FFT_HPP

#include <complex>
#include <vector>

namespace gnwave::spectral {

using cplx = std::complex<double>;
using real_buf = std::vector<double>;
using cplx_buf = std::vector<cplx>;

// Real-to-complex transform pair of fixed size n. The forward transform is
// normalized by 1/n, so the coefficients approximate the Fourier
// coefficients of the sampled function and a forward/inverse round trip is
// the identity. Plans are created once (plan creation is serialized
// internally; execution on distinct buffers is safe from multiple threads).
class Fft {
public:
  explicit Fft(int n);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  int size() const { return n_; }
  int modes() const { return n_ / 2 + 1; }

  // out has n/2+1 entries; in is left untouched
  void forward(const double* in, cplx* out) const;
  // in has n/2+1 entries and is left untouched; out has n entries
  void inverse(const cplx* in, double* out) const;

private:
  int n_;
  void* fwd_;
  void* inv_;
  double* rproto_;
  void* cproto_;
};

} // namespace gnwave::spectral

#endif
