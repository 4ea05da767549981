#include "gnwave/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gnwave::spectral {

double Grid::dx() const { return 2.0 * std::numbers::pi * length / n; }

Grid make_grid(int n, double length) {
  if (n < 8 || n % 2 != 0)
    throw std::invalid_argument("make_grid: n must be even and at least 8");
  if (!(length > 0.0))
    throw std::invalid_argument("make_grid: length must be positive");
  Grid g;
  g.n = n;
  g.length = length;
  g.x.resize(n);
  const double pl = std::numbers::pi * length;
  const double h = 2.0 * pl / n;
  for (int i = 0; i < n; ++i)
    g.x[i] = -pl + (i + 1) * h;
  g.k.resize(n / 2 + 1);
  for (int j = 0; j <= n / 2; ++j)
    g.k[j] = j / length;
  g.fft = std::make_shared<Fft>(n);
  return g;
}

} // namespace gnwave::spectral
