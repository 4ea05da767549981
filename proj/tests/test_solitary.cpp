#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gnwave/errors.hpp"
#include "gnwave/solitary.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace gnwave;
using spectral::Field;
using spectral::Grid;

namespace {

spectral::real_buf band_limited_values(const Grid& g, int jmax, unsigned seed, double amp) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  spectral::real_buf v(g.n, 0.0);
  for (int j = 0; j <= jmax; ++j) {
    const double a = unif(rng) * amp;
    const double b = unif(rng) * amp;
    for (int i = 0; i < g.n; ++i)
      v[i] += a * std::cos(j * g.x[i] / g.length) + b * std::sin(j * g.x[i] / g.length);
  }
  return v;
}

// quadratic-convergence property: each residual bounded by K times the
// square of the previous one, skipping pairs whose prediction dips under
// the spectral-filter noise floor where the square law cannot be observed
void check_quadratic(const std::vector<double>& hist, double K, double floor) {
  int checked = 0;
  for (std::size_t m = 0; m + 1 < hist.size(); ++m) {
    if (hist[m] > 1e-3)
      continue; // asymptotic regime only
    const double predicted = K * hist[m] * hist[m];
    if (predicted < floor)
      continue;
    CHECK(hist[m + 1] <= predicted);
    ++checked;
  }
  CHECK(checked >= 1);
}

double cosine(const std::vector<double>& a, const spectral::real_buf& b) {
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  return std::fabs(ab) / std::sqrt(aa * bb);
}

} // namespace

TEST_CASE("closed-form local-model wave annihilates the traveling residual") {
  const auto g = spectral::make_grid(512, 10.0);
  for (double c : {1.3, 2.0, 2.5}) {
    CAPTURE(c);
    const auto ex = solitary::sgn_solitary(g, c);
    const auto r = solitary::traveling_residual(ex.eta, c, Model::sgn);
    CHECK(spectral::norm_inf(r.values) < 1e-10);

    // peak amplitude of the closed form: zeta(0) = c^2 - 1
    CHECK(spectral::norm_inf(ex.zeta.values) == doctest::Approx(c * c - 1.0).epsilon(1e-12));
    const double umax = c * (c * c - 1.0) / (c * c);
    CHECK(spectral::norm_inf(ex.u.values) == doctest::Approx(umax).epsilon(1e-12));
  }

  // the amplitude vanishes as c -> 1
  const auto small = solitary::sgn_solitary(g, 1.001);
  CHECK(spectral::norm_inf(small.zeta.values) < 3e-3);
}

TEST_CASE("eta_to_fields applies the pointwise relations") {
  const auto g = spectral::make_grid(64, 5.0);

  // constant eta = 3/4 at c = 2: zeta = 3, u = 3/2, h = 4
  spectral::real_buf v(g.n, 0.75);
  const auto f = solitary::eta_to_fields(spectral::make_field(g, v), 2.0);
  for (int i = 0; i < g.n; ++i) {
    CHECK(f.zeta.values[i] == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(f.u.values[i] == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(f.h.values[i] == doctest::Approx(4.0).epsilon(1e-14));
  }

  // round trip through the closed-form wave: eta -> (zeta, u) -> eta
  const auto gw = spectral::make_grid(512, 10.0);
  const auto ex = solitary::sgn_solitary(gw, 2.0);
  const auto back = solitary::eta_to_fields(ex.eta, 2.0);
  for (int i = 0; i < gw.n; ++i) {
    CHECK(back.zeta.values[i] == doctest::Approx(ex.zeta.values[i]).epsilon(1e-12));
    CHECK(back.u.values[i] == doctest::Approx(ex.u.values[i]).epsilon(1e-12));
  }

  // the depth guard rejects eta near 1
  spectral::real_buf bad(g.n, 0.0);
  bad[3] = 1.0 - 1e-9;
  CHECK_THROWS((void)solitary::eta_to_fields(spectral::make_field(g, bad), 2.0));
}

TEST_CASE("jacobian matches a centered finite difference of the residual") {
  const auto g = spectral::make_grid(256, 10.0);
  for (Model model : {Model::sgn, Model::wgn}) {
    CAPTURE(model_name(model));
    const double c = 2.0;
    const auto base = solitary::sgn_solitary(g, c).eta;
    const solitary::TravelingJacobian jac(base, c, model);

    const auto w = band_limited_values(g, 12, 1, 1.0);
    std::vector<double> jw(g.n);
    jac.apply(w.data(), jw.data());

    const double eps = 1e-5;
    spectral::real_buf ep(g.n), em(g.n);
    for (int i = 0; i < g.n; ++i) {
      ep[i] = base.values[i] + eps * w[i];
      em[i] = base.values[i] - eps * w[i];
    }
    const auto rp = solitary::traveling_residual(spectral::make_field(g, ep), c, model);
    const auto rm = solitary::traveling_residual(spectral::make_field(g, em), c, model);

    double err = 0.0, scale = 0.0;
    for (int i = 0; i < g.n; ++i) {
      const double fd = (rp.values[i] - rm.values[i]) / (2.0 * eps);
      err = std::max(err, std::fabs(jw[i] - fd));
      scale = std::max(scale, std::fabs(fd));
    }
    CHECK(err / scale < 1e-6);

    // linearity in the probe
    std::vector<double> w2(g.n), jw2(g.n);
    for (int i = 0; i < g.n; ++i)
      w2[i] = -2.5 * w[i];
    jac.apply(w2.data(), jw2.data());
    for (int i = 0; i < g.n; ++i)
      CHECK(jw2[i] == doctest::Approx(-2.5 * jw[i]).epsilon(1e-12));
  }
}

TEST_CASE("jacobian at the rest state is the dispersive symbol plus a constant") {
  const auto g = spectral::make_grid(128, 4.0);
  const double c = 1.7;
  for (Model model : {Model::sgn, Model::wgn}) {
    CAPTURE(model_name(model));
    const auto zero = spectral::zero_field(g);
    const solitary::TravelingJacobian jac(zero, c, model);
    const auto sym = spectral::make_deriv_symbol(g, model, 1.0);

    // apply to a single harmonic: the response is diagonal per mode
    for (int j : {1, 5, 17}) {
      spectral::real_buf w(g.n);
      for (int i = 0; i < g.n; ++i)
        w[i] = std::cos(j * g.x[i] / g.length);
      std::vector<double> jw(g.n);
      jac.apply(w.data(), jw.data());
      const double mult = sym.m[j] * sym.m[j] / 3.0 + 1.0 - 1.0 / (c * c);
      for (int i = 0; i < g.n; ++i)
        CHECK(jw[i] == doctest::Approx(mult * w[i]).epsilon(1e-10).scale(mult));
    }
  }
}

TEST_CASE("newton converges fast on the full-dispersion wave at c = 1.1") {
  const auto g = spectral::make_grid(512, 20.0);
  const auto w = solitary::newton_solve(g, 1.1, Model::wgn);
  CHECK(w.newton_iterations <= 4);
  CHECK(w.residual_norm <= 1e-12);
  CHECK_FALSE(w.at_floor);
  check_quadratic(w.residual_history, 1e3, 5e-12);

  // even profile, single peak at the origin
  const auto& eta = w.eta.values;
  for (int i = 0; i < g.n - 1; ++i)
    CHECK(std::fabs(eta[g.reflect_index(i)] - eta[i]) < 1e-10);
  const int ipeak = g.n / 2 - 1; // x = 0
  for (int i = 0; i + 1 < g.n; ++i) {
    if (g.x[i] < 0.0 && i + 1 <= ipeak)
      CHECK(eta[i + 1] >= eta[i] - 1e-13);
    if (g.x[i] >= 0.0 && i + 1 < g.n)
      CHECK(eta[i + 1] <= eta[i] + 1e-13);
  }
}

TEST_CASE("newton at c = 2 stays under five iterations at doubled resolution") {
  const auto g = spectral::make_grid(1024, 20.0);
  const auto w = solitary::newton_solve(g, 2.0, Model::wgn);
  CHECK(w.newton_iterations <= 5);
  CHECK(w.residual_norm <= 1e-11);
  check_quadratic(w.residual_history, 1e3, 5e-12);
  for (std::size_t m = 1; m < w.residual_history.size(); ++m)
    CHECK(w.residual_history[m] < w.residual_history[m - 1]);

  // independent cross-check through the surface-variable residual
  const auto chk = solitary::surface_residual_check(w.zeta, 2.0, Model::wgn);
  CHECK(spectral::norm_inf(chk.values) < 1e-8);
}

TEST_CASE("lu backend reaches its floor at c = 3") {
  const auto g = spectral::make_grid(1024, 10.0);
  solitary::NewtonOptions opts;
  opts.backend = solitary::Backend::lu;
  const auto w = solitary::newton_solve(g, 3.0, Model::wgn, opts);
  CHECK(w.residual_norm <= 1e-8);
  CHECK(w.backend == solitary::Backend::lu);
  CHECK(spectral::norm_inf(w.zeta.values) > 1.0); // a genuinely large wave
}

TEST_CASE("gmres iteration counts stay moderate with the spectral preconditioner") {
  const auto g = spectral::make_grid(512, 20.0);
  const auto w = solitary::newton_solve(g, 1.1, Model::wgn);
  REQUIRE_FALSE(w.gmres_iterations.empty());
  for (int n : w.gmres_iterations) {
    CHECK(n >= 1);
    CHECK(n <= 60);
  }
}

TEST_CASE("continuation: single target equals the direct solve") {
  const auto g = spectral::make_grid(512, 20.0);
  const auto direct = solitary::newton_solve(g, 1.1, Model::wgn);
  const auto cont = solitary::continuation(g, {1.1}, Model::wgn);
  REQUIRE(cont.completed);
  REQUIRE(cont.waves.size() == 1);
  for (int i = 0; i < g.n; ++i)
    CHECK(cont.waves[0].eta.values[i] ==
          doctest::Approx(direct.eta.values[i]).epsilon(1e-12).scale(1.0));
}

TEST_CASE("continuation walks a family and benefits from extrapolated seeds") {
  const auto g = spectral::make_grid(1024, 20.0);
  const auto cont = solitary::continuation(g, {1.5, 2.0, 2.5, 3.0}, Model::wgn);
  REQUIRE(cont.completed);
  REQUIRE(cont.waves.size() == 4);
  for (const auto& w : cont.waves) {
    CHECK(w.residual_norm <= 1e-4); // every member genuinely converged
    CHECK(spectral::norm_inf(w.eta.values) < 1.0);
  }
  // amplitudes increase along the family
  for (std::size_t i = 1; i < cont.waves.size(); ++i)
    CHECK(spectral::norm_inf(cont.waves[i].zeta.values) >
          spectral::norm_inf(cont.waves[i - 1].zeta.values));

  // no step along the family costs more than a cold start at the hardest
  // target: the extrapolated (or explicit, whichever starts closer) seed
  // keeps per-step effort bounded
  const auto direct = solitary::newton_solve(g, 3.0, Model::wgn);
  for (const auto& w : cont.waves)
    CHECK(w.newton_iterations <= direct.newton_iterations);
}

TEST_CASE("continuation reports the first failing velocity and keeps earlier waves") {
  // deliberately under-resolved for c = 20: the iteration stalls far from
  // the tolerance and the family stops there
  const auto g = spectral::make_grid(512, 10.0);
  const auto cont = solitary::continuation(g, {2.0, 20.0}, Model::wgn);
  CHECK_FALSE(cont.completed);
  CHECK(cont.failed_c == 20.0);
  REQUIRE(cont.waves.size() == 1);
  CHECK(cont.waves[0].c == 2.0);
  CHECK(cont.waves[0].residual_norm <= 1e-10);
  CHECK_FALSE(cont.failure.empty());
}

TEST_CASE("continuation rejects non-ascending targets") {
  const auto g = spectral::make_grid(512, 10.0);
  CHECK_THROWS((void)solitary::continuation(g, {2.0, 1.5}, Model::wgn));
  CHECK_THROWS((void)solitary::continuation(g, {}, Model::wgn));
}

TEST_CASE("the linearization at a computed wave is singular along translation only") {
  const auto g = spectral::make_grid(512, 10.0);
  const double c = 2.0;
  const auto ex = solitary::sgn_solitary(g, c);
  const solitary::TravelingJacobian jac(ex.eta, c, Model::sgn);
  auto a = krylov::assemble_dense(jac.as_operator());

  // smallest singular value by inverse iteration on M^T M via LU solves
  auto smallest_sigma = [&](const krylov::DenseMatrix& m, std::vector<double> v) {
    auto mt = m;
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < i; ++j)
        std::swap(mt.a[std::size_t(i) * g.n + j], mt.a[std::size_t(j) * g.n + i]);
    const auto fm = krylov::lu_factor(m);
    const auto fmt = krylov::lu_factor(mt);
    for (int it = 0; it < 25; ++it) {
      krylov::lu_solve_factored(fmt, v.data());
      krylov::lu_solve_factored(fm, v.data());
      double nrm = 0.0;
      for (double e : v)
        nrm += e * e;
      nrm = std::sqrt(nrm);
      for (auto& e : v)
        e /= nrm;
    }
    std::vector<double> mv(g.n);
    krylov::dense_apply(m, v.data(), mv.data());
    double s = 0.0;
    for (double e : mv)
      s += e * e;
    return std::make_pair(std::sqrt(s), v);
  };

  const auto [sigma1, v1] = smallest_sigma(a, band_limited_values(g, 30, 7, 1.0));
  CHECK(sigma1 < 1e-6);

  // the near-null direction is the translation mode d(eta)/dx
  const auto sym = spectral::make_deriv_symbol(g, Model::sgn, 1.0);
  const auto deta = spectral::apply_deriv(ex.eta, sym);
  CHECK(cosine(v1, deta.values) > 0.99);

  // lifting that one direction with a rank-one shift makes the matrix
  // uniformly invertible: the rest of the spectrum is far from zero
  auto shifted = a;
  krylov::add_rank_one(shifted, deta.values, 10.0);
  const auto [sigma2, v2] = smallest_sigma(shifted, band_limited_values(g, 30, 8, 1.0));
  CHECK(sigma2 > 1e-3);
  CHECK(sigma2 / sigma1 > 1e3); // one isolated near-null direction
  CHECK(cosine(v2, deta.values) < 0.5);
}
