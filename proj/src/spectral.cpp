#include "gnwave/spectral.hpp"

#include "gnwave/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace gnwave::spectral {

Field make_field(const Grid& g, real_buf values) {
  if ((int)values.size() != g.n)
    throw std::invalid_argument("make_field: value count does not match grid");
  Field f;
  f.grid = &g;
  f.values = std::move(values);
  f.spectrum.resize(g.modes());
  g.fft->forward(f.values.data(), f.spectrum.data());
  return f;
}

Field make_field_from_spectrum(const Grid& g, cplx_buf spectrum) {
  if ((int)spectrum.size() != g.modes())
    throw std::invalid_argument("make_field_from_spectrum: mode count does not match grid");
  Field f;
  f.grid = &g;
  f.spectrum = std::move(spectrum);
  f.values.resize(g.n);
  g.fft->inverse(f.spectrum.data(), f.values.data());
  return f;
}

Field zero_field(const Grid& g) {
  Field f;
  f.grid = &g;
  f.values.assign(g.n, 0.0);
  f.spectrum.assign(g.modes(), cplx(0.0, 0.0));
  return f;
}

cplx_buf forward_transform(const Grid& g, const real_buf& values) {
  if ((int)values.size() != g.n)
    throw std::invalid_argument("forward_transform: value count does not match grid");
  cplx_buf out(g.modes());
  g.fft->forward(values.data(), out.data());
  return out;
}

real_buf inverse_transform(const Grid& g, const cplx_buf& spectrum) {
  if ((int)spectrum.size() != g.modes())
    throw std::invalid_argument("inverse_transform: mode count does not match grid");
  real_buf out(g.n);
  g.fft->inverse(spectrum.data(), out.data());
  return out;
}

FullSpectrum full_spectrum(const Grid& g, const cplx_buf& half) {
  if ((int)half.size() != g.modes())
    throw std::invalid_argument("full_spectrum: mode count does not match grid");
  // stored coefficients follow the index-space DFT; the x-space coefficient
  // of e^{i k_j x} picks up the phase of the first node, a_j = b_j e^{i j
  // (pi - 2 pi / n)}, because the grid starts at -pi*length + dx
  const double theta = 3.14159265358979323846 * (1.0 - 2.0 / g.n);
  const cplx w(std::cos(theta), std::sin(theta));
  FullSpectrum fs;
  fs.j.reserve(g.n);
  fs.coeff.reserve(g.n);
  cplx phase(1.0, 0.0);
  cplx_buf a(g.modes());
  for (int j = 0; j < g.modes(); ++j) {
    a[j] = half[j] * phase;
    phase *= w;
  }
  for (int j = -g.n / 2 + 1; j <= g.n / 2; ++j) {
    fs.j.push_back(j);
    fs.coeff.push_back(j >= 0 ? a[j] : std::conj(a[-j]));
  }
  return fs;
}

double whitham_symbol(double kappa) {
  const double k = std::fabs(kappa);
  if (k < 0.25) {
    // series for F^2 = 3/(k tanh k) - 3/k^2 about k = 0; the direct form
    // loses all digits to cancellation here
    const double k2 = k * k;
    const double f2 =
        1.0 + k2 * (-1.0 / 15.0 +
                    k2 * (2.0 / 315.0 +
                          k2 * (-1.0 / 1575.0 +
                                k2 * (2.0 / 31185.0 + k2 * (-1382.0 / 212837625.0)))));
    return std::sqrt(f2);
  }
  return std::sqrt(3.0 / (k * std::tanh(k)) - 3.0 / (k * k));
}

DerivSymbol make_deriv_symbol(const Grid& g, Model model, double delta) {
  if (!(delta > 0.0))
    throw std::invalid_argument("make_deriv_symbol: delta must be positive");
  DerivSymbol d;
  d.m.resize(g.modes());
  for (int j = 0; j < g.modes(); ++j)
    d.m[j] = model == Model::wgn ? g.k[j] * whitham_symbol(delta * g.k[j]) : g.k[j];
  d.m[g.nyquist()] = 0.0; // odd symbol has no consistent Nyquist value
  return d;
}

void apply_deriv_spectrum(const DerivSymbol& d, cplx* spec) {
  kernels::apply_imag_symbol(d.m.size(), d.m.data(), spec);
}

Field apply_deriv(const Field& f, const DerivSymbol& d) {
  cplx_buf spec = f.spectrum;
  apply_deriv_spectrum(d, spec.data());
  return make_field_from_spectrum(*f.grid, std::move(spec));
}

void krasny_filter_spectrum(cplx_buf& spec, double eps) {
  for (auto& c : spec)
    if (std::abs(c) < eps)
      c = cplx(0.0, 0.0);
}

void krasny_filter(Field& f, double eps) {
  krasny_filter_spectrum(f.spectrum, eps);
  f.grid->fft->inverse(f.spectrum.data(), f.values.data());
}

void dealias_two_thirds(const Grid& g, cplx* spec) {
  for (int j = 0; j <= g.n / 2; ++j)
    if (3 * j > g.n)
      spec[j] = cplx(0.0, 0.0);
}

Field shift_field(const Field& f, double s) {
  const Grid& g = *f.grid;
  cplx_buf spec = f.spectrum;
  for (int j = 0; j < g.nyquist(); ++j) {
    const double ph = g.k[j] * s;
    spec[j] *= cplx(std::cos(ph), -std::sin(ph));
  }
  // the Nyquist mode only represents cos(k x); keep its cosine part
  spec[g.nyquist()] *= std::cos(g.k[g.nyquist()] * s);
  return make_field_from_spectrum(g, std::move(spec));
}

Field reflect_field(const Field& f) {
  const Grid& g = *f.grid;
  real_buf v(g.n);
  for (int i = 0; i < g.n; ++i)
    v[i] = f.values[g.reflect_index(i)];
  return make_field(g, std::move(v));
}

void even_symmetrize(const Grid& g, real_buf& values) {
  for (int i = 0; i < g.n; ++i) {
    const int r = g.reflect_index(i);
    if (r < i)
      continue;
    const double avg = 0.5 * (values[i] + values[r]);
    values[i] = avg;
    values[r] = avg;
  }
}

double norm_inf(const real_buf& v) { return kernels::max_abs(v.size(), v.data()); }

double integral(const Grid& g, const real_buf& v) {
  return g.quad_weight() * kernels::sum(v.size(), v.data());
}

} // namespace gnwave::spectral
