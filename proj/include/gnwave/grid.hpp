#ifndef GNWAVE_GRID_HPP
#define GNWAVE_GRID_HPP

#include "gnwave/fft.hpp"

#include <memory>
#include <vector>

namespace gnwave::spectral {

// Periodic collocation grid on [-pi*length, pi*length] with n points
// x_i = -pi*length + (i+1)*dx, dx = 2*pi*length/n. The point x = 0 lies on
// the grid (index n/2 - 1) and x = pi*length is identified with
// x = -pi*length. Wavenumbers are k_j = j/length; the half ladder
// j = 0..n/2 is stored (real data, conjugate-symmetric spectra).
struct Grid {
  int n = 0;
  double length = 0.0;
  std::vector<double> x;
  std::vector<double> k;
  std::shared_ptr<const Fft> fft;

  double dx() const;
  double quad_weight() const { return dx(); }
  int modes() const { return n / 2 + 1; }
  int nyquist() const { return n / 2; }
  // index of the grid point at -x[i]; x = pi*length maps to itself
  int reflect_index(int i) const { return i == n - 1 ? i : n - 2 - i; }
};

// n must be even and at least 8, length positive
Grid make_grid(int n, double length);

} // namespace gnwave::spectral

#endif
