#ifndef GNWAVE_SPECTRAL_HPP
#define GNWAVE_SPECTRAL_HPP

#include "gnwave/grid.hpp"
#include "gnwave/model.hpp"

#include <vector>

namespace gnwave::spectral {

// A real periodic field carrying both views: collocation values (size n)
// and conjugate-symmetric spectrum (size n/2+1, forward-normalized).
// Constructors keep the two views consistent; code that mutates one view
// directly is responsible for re-syncing the other.
struct Field {
  const Grid* grid = nullptr;
  real_buf values;
  cplx_buf spectrum;
};

Field make_field(const Grid& g, real_buf values);
Field make_field_from_spectrum(const Grid& g, cplx_buf spectrum);
Field zero_field(const Grid& g);

// primitive transforms (same normalization as Field)
cplx_buf forward_transform(const Grid& g, const real_buf& values);
real_buf inverse_transform(const Grid& g, const cplx_buf& spectrum);

// full mode ladder j = -n/2+1 .. n/2 reconstructed from the half spectrum;
// returned in that order together with the mode indices
struct FullSpectrum {
  std::vector<int> j;
  cplx_buf coeff;
};
FullSpectrum full_spectrum(const Grid& g, const cplx_buf& half);

// Fourier multiplier of the dispersive derivative: m_j = k_j * F(delta*k_j)
// for the full-dispersion model, m_j = k_j otherwise. The Nyquist entry is
// zero (odd symbol). Applying the operator multiplies the spectrum by i*m_j.
struct DerivSymbol {
  std::vector<double> m;
};

// F(kappa) = sqrt(3/(kappa*tanh(kappa)) - 3/kappa^2), F(0) = 1, even,
// strictly decreasing in |kappa|; a Taylor branch is used for small kappa
// to avoid cancellation.
double whitham_symbol(double kappa);

DerivSymbol make_deriv_symbol(const Grid& g, Model model, double delta);

// derivative with the given multiplier; both views of the result are valid
Field apply_deriv(const Field& f, const DerivSymbol& d);
// in-place spectral version: spec[j] *= i*m_j
void apply_deriv_spectrum(const DerivSymbol& d, cplx* spec);

// zero coefficients with |coeff| < eps (both parts of the view are redone)
void krasny_filter(Field& f, double eps);
void krasny_filter_spectrum(cplx_buf& spec, double eps);

// 2/3-rule dealiasing: zero modes with 3*|j| > n
void dealias_two_thirds(const Grid& g, cplx* spec);

// translate by s: result(x) = f(x - s); the Nyquist mode is projected onto
// its shifted cosine component
Field shift_field(const Field& f, double s);

// result(x) = f(-x)
Field reflect_field(const Field& f);
// (f(x) + f(-x)) / 2
void even_symmetrize(const Grid& g, real_buf& values);

double norm_inf(const real_buf& v);
// trapezoidal = spectrally accurate quadrature on the periodic grid
double integral(const Grid& g, const real_buf& v);

} // namespace gnwave::spectral

#endif
