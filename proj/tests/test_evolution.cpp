#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gnwave/evolution.hpp"
#include "gnwave/solitary.hpp"

#include <cmath>
#include <complex>
#include <random>

using namespace gnwave;
using spectral::Grid;

namespace {

constexpr double pi = 3.14159265358979323846;

double max_err(const spectral::real_buf& a, const spectral::real_buf& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

evolution::State wave_state(const Grid& g, const evolution::System& sys,
                            const solitary::ExplicitWave& ex) {
  const auto v = evolution::velocity_to_momentum(g, sys, ex.zeta.values, ex.u.values);
  return evolution::make_state(g, ex.zeta, spectral::make_field(g, v));
}

} // namespace

TEST_CASE("flat-surface elliptic inversion is diagonal per mode") {
  const double L = 2.0;
  const auto g = spectral::make_grid(128, L);
  const spectral::real_buf zero(g.n, 0.0);

  for (int j : {1, 4, 19}) {
    CAPTURE(j);
    spectral::real_buf v(g.n);
    for (int i = 0; i < g.n; ++i)
      v[i] = std::sin(j * g.x[i] / L);
    const double k = j / L;

    evolution::System sgn;
    sgn.model = Model::sgn;
    auto u = evolution::solve_velocity(g, sgn, zero, v);
    double want = 1.0 / (1.0 + k * k / 3.0);
    for (int i = 0; i < g.n; ++i)
      CHECK(u[i] == doctest::Approx(want * v[i]).epsilon(1e-11).scale(1.0));

    evolution::System wgn;
    wgn.model = Model::wgn;
    wgn.delta = 0.8;
    u = evolution::solve_velocity(g, wgn, zero, v);
    // 1 + kappa^2 F(kappa)^2 / 3 collapses to kappa / tanh(kappa)
    want = std::tanh(0.8 * k) / (0.8 * k);
    for (int i = 0; i < g.n; ++i)
      CHECK(u[i] == doctest::Approx(want * v[i]).epsilon(1e-11).scale(1.0));
  }
}

TEST_CASE("velocity_to_momentum on a single mode applies 1 + k^2/3") {
  const double L = 3.0;
  const auto g = spectral::make_grid(128, L);
  spectral::real_buf u(g.n), zero(g.n, 0.0);
  for (int i = 0; i < g.n; ++i)
    u[i] = std::sin(g.x[i] / L);
  evolution::System sys; // sgn, delta 1
  const auto v = evolution::velocity_to_momentum(g, sys, zero, u);
  const double want = 1.0 + 1.0 / (3.0 * L * L);
  for (int i = 0; i < g.n; ++i)
    CHECK(v[i] == doctest::Approx(want * u[i]).epsilon(1e-13).scale(1.0));

  // u = 0 maps to v = 0 exactly
  const auto v0 = evolution::velocity_to_momentum(g, sys, zero, zero);
  for (double e : v0)
    CHECK(e == 0.0);
}

TEST_CASE("elliptic solve inverts the forward operator over a bumpy bottom") {
  const auto g = spectral::make_grid(256, 5.0);
  spectral::real_buf zeta(g.n), u_true(g.n);
  for (int i = 0; i < g.n; ++i) {
    zeta[i] = 0.4 * std::exp(std::cos(g.x[i] / 5.0)) / std::exp(1.0) - 0.1;
    u_true[i] = 0.3 * std::sin(g.x[i] / 5.0) + 0.05 * std::cos(3.0 * g.x[i] / 5.0);
  }
  for (Model model : {Model::sgn, Model::wgn}) {
    CAPTURE(model_name(model));
    evolution::System sys;
    sys.model = model;
    const auto v = evolution::velocity_to_momentum(g, sys, zeta, u_true);
    krylov::SolveStats st;
    const auto u = evolution::solve_velocity(g, sys, zeta, v, &st);
    CHECK(st.converged);
    CHECK(max_err(u, u_true) < 1e-11);
  }
}

TEST_CASE("warm-started elliptic solver answers repeated solves for free") {
  const auto g = spectral::make_grid(256, 5.0);
  evolution::System sys;
  spectral::real_buf zeta(g.n), u(g.n), h(g.n), got(g.n);
  for (int i = 0; i < g.n; ++i) {
    zeta[i] = 0.3 * std::cos(g.x[i] / 5.0);
    h[i] = 1.0 + zeta[i];
    u[i] = 0.2 * std::sin(2.0 * g.x[i] / 5.0);
  }
  const auto v = evolution::velocity_to_momentum(g, sys, zeta, u);

  evolution::EllipticSolver solver(g, sys);
  const auto first = solver.solve(h, v, got);
  CHECK(first.converged);
  CHECK(first.iterations > 1);
  const auto second = solver.solve(h, v, got);
  CHECK(second.converged);
  CHECK(second.iterations <= 1); // the warm start is already the answer
  CHECK(solver.total_iterations() == first.iterations + second.iterations);

  solver.reset();
  const auto third = solver.solve(h, v, got);
  CHECK(third.iterations == first.iterations);
}

TEST_CASE("the rest state is an exact fixed point") {
  const auto g = spectral::make_grid(64, 2.0);
  evolution::System sys;
  auto st = evolution::make_state(g, spectral::zero_field(g), spectral::zero_field(g));
  auto res = evolution::evolve(std::move(st), 1.0, 20, sys);
  CHECK_FALSE(res.aborted);
  for (const auto& c : res.final_state.zeta_hat)
    CHECK(c == spectral::cplx(0.0, 0.0));
  for (const auto& c : res.final_state.v_hat)
    CHECK(c == spectral::cplx(0.0, 0.0));
  for (const auto& rec : res.diagnostics) {
    CHECK(rec.q.mass == 0.0);
    CHECK(rec.q.energy == 0.0);
  }
}

TEST_CASE("rhs of a traveling wave is minus c times the space derivative") {
  const auto g = spectral::make_grid(512, 10.0);
  const double c = 2.0;
  evolution::System sys;
  const auto ex = solitary::sgn_solitary(g, c);
  auto st = wave_state(g, sys, ex);

  evolution::Stepper stepper(g, sys);
  spectral::cplx_buf dz(g.modes()), dv(g.modes());
  stepper.rhs(st.zeta_hat.data(), st.v_hat.data(), dz.data(), dv.data());

  // compare against -c * ik * coefficients, mode by mode
  double worst = 0.0;
  for (int j = 0; j < g.nyquist(); ++j) {
    const spectral::cplx want_z = -c * spectral::cplx(0.0, g.k[j]) * st.zeta_hat[j];
    const spectral::cplx want_v = -c * spectral::cplx(0.0, g.k[j]) * st.v_hat[j];
    worst = std::max({worst, std::abs(dz[j] - want_z), std::abs(dv[j] - want_v)});
  }
  CHECK(worst < 1e-9);

  // both right-hand sides are exact derivatives: their means vanish exactly
  CHECK(dz[0] == spectral::cplx(0.0, 0.0));
  CHECK(dv[0] == spectral::cplx(0.0, 0.0));
}

TEST_CASE("small-amplitude waves oscillate at the model dispersion relation") {
  const double L = 1.0;
  const auto g = spectral::make_grid(64, L);
  const int j = 3;
  const double k = j / L;
  const double eps = 1e-8;

  spectral::real_buf zeta(g.n);
  for (int i = 0; i < g.n; ++i)
    zeta[i] = eps * std::cos(k * g.x[i]);
  const spectral::real_buf zero(g.n, 0.0);

  struct Case {
    Model model;
    double omega;
  };
  const Case cases[] = {
      {Model::sgn, k / std::sqrt(1.0 + k * k / 3.0)},
      {Model::wgn, std::sqrt(k * std::tanh(k))}, // full water-wave dispersion
  };
  for (const auto& cs : cases) {
    CAPTURE(model_name(cs.model));
    evolution::System sys;
    sys.model = cs.model;
    auto st = evolution::make_state(g, spectral::make_field(g, zeta),
                                    spectral::make_field(g, zero));
    const double T = 1.0;
    auto res = evolution::evolve(std::move(st), T, 400, sys);
    REQUIRE_FALSE(res.aborted);
    const auto zf = spectral::inverse_transform(g, res.final_state.zeta_hat);
    double err = 0.0;
    for (int i = 0; i < g.n; ++i)
      err = std::max(err, std::fabs(zf[i] - eps * std::cos(k * g.x[i]) * std::cos(cs.omega * T)));
    // linearization error O(eps^2) and RK4 error are both far below eps
    CHECK(err < 1e-5 * eps);
  }
}

TEST_CASE("time stepping self-converges at fourth order") {
  const auto g = spectral::make_grid(256, 10.0);
  evolution::System sys;
  const auto ex = solitary::sgn_solitary(g, 2.0);
  const double T = 0.5;

  auto run = [&](int nt) {
    auto st = wave_state(g, sys, ex);
    auto res = evolution::evolve(std::move(st), T, nt, sys);
    REQUIRE_FALSE(res.aborted);
    return spectral::inverse_transform(g, res.final_state.zeta_hat);
  };

  const auto z40 = run(40), z80 = run(80), z160 = run(160);
  const double e1 = max_err(z40, z80);
  const double e2 = max_err(z80, z160);
  const double order = std::log2(e1 / e2);
  CHECK(order > 3.8);
  CHECK(order < 4.5);
}

TEST_CASE("conserved quantities reproduce closed forms") {
  const auto g = spectral::make_grid(512, 10.0);
  evolution::System sys;

  // rest state: all four vanish
  const spectral::real_buf zero(g.n, 0.0);
  auto q = evolution::conserved(g, sys, zero, zero, zero);
  CHECK(q.mass == 0.0);
  CHECK(q.momentum == 0.0);
  CHECK(q.energy == 0.0);
  CHECK(q.impulse == 0.0);

  // standing cosine: only the energy integral survives
  const double a = 0.25;
  spectral::real_buf zc(g.n);
  for (int i = 0; i < g.n; ++i)
    zc[i] = a * std::cos(g.x[i] / 10.0);
  q = evolution::conserved(g, sys, zc, zero, zero);
  CHECK(std::fabs(q.mass) < 1e-14);
  CHECK(q.momentum == 0.0);
  CHECK(q.energy == doctest::Approx(a * a * pi * 10.0).epsilon(1e-13));

  // explicit wave: mass has a closed form, and h u = c zeta pointwise
  const double c = 2.0;
  const auto ex = solitary::sgn_solitary(g, c);
  const auto v = evolution::velocity_to_momentum(g, sys, ex.zeta.values, ex.u.values);
  q = evolution::conserved(g, sys, ex.zeta.values, ex.u.values, v);
  const double alpha = 0.5 * std::sqrt(3.0) * std::sqrt(c * c - 1.0) / c;
  CHECK(q.mass == doctest::Approx(2.0 * (c * c - 1.0) / alpha).epsilon(1e-12));
  CHECK(q.momentum == doctest::Approx(c * q.mass).epsilon(1e-13));
  CHECK(q.energy > 0.0);
}

TEST_CASE("zero modes are conserved bit for bit") {
  const auto g = spectral::make_grid(128, 5.0);
  evolution::System sys;
  spectral::real_buf zeta(g.n), u(g.n);
  for (int i = 0; i < g.n; ++i) {
    zeta[i] = 0.1 + 0.2 * std::cos(g.x[i] / 5.0); // nonzero mean on purpose
    u[i] = 0.1 * std::sin(g.x[i] / 5.0);
  }
  const auto v = evolution::velocity_to_momentum(g, sys, zeta, u);
  auto st = evolution::make_state(g, spectral::make_field(g, zeta),
                                  spectral::make_field(g, v));
  const auto z0 = st.zeta_hat[0];
  const auto v0 = st.v_hat[0];
  auto res = evolution::evolve(std::move(st), 0.5, 100, sys);
  REQUIRE_FALSE(res.aborted);
  CHECK(res.final_state.zeta_hat[0] == z0);
  CHECK(res.final_state.v_hat[0] == v0);
}

TEST_CASE("evolution commutes with whole-cell translation") {
  const auto g = spectral::make_grid(256, 10.0);
  evolution::System sys;
  const auto ex = solitary::sgn_solitary(g, 1.5);
  const double shift = 7.0 * g.dx();

  auto run = [&](const spectral::Field& z, const spectral::Field& u) {
    const auto v = evolution::velocity_to_momentum(g, sys, z.values, u.values);
    auto st = evolution::make_state(g, z, spectral::make_field(g, v));
    auto res = evolution::evolve(std::move(st), 0.5, 100, sys);
    REQUIRE_FALSE(res.aborted);
    return spectral::inverse_transform(g, res.final_state.zeta_hat);
  };

  const auto plain = run(ex.zeta, ex.u);
  const auto moved = run(spectral::shift_field(ex.zeta, shift), spectral::shift_field(ex.u, shift));

  const auto plain_f = spectral::make_field(g, plain);
  const auto expected = spectral::shift_field(plain_f, shift);
  CHECK(max_err(moved, expected.values) < 1e-11);
}

TEST_CASE("evolution commutes with reflection") {
  const auto g = spectral::make_grid(256, 10.0);
  evolution::System sys;
  // asymmetric initial data: a wave plus a lopsided bump
  const auto ex = solitary::sgn_solitary(g, 1.5);
  spectral::real_buf z0(g.n), u0(g.n);
  for (int i = 0; i < g.n; ++i) {
    const double bump = 0.05 * std::exp(-(g.x[i] - 3.0) * (g.x[i] - 3.0));
    z0[i] = ex.zeta.values[i] + bump;
    u0[i] = ex.u.values[i];
  }

  auto run = [&](const spectral::real_buf& z, const spectral::real_buf& u) {
    const auto v = evolution::velocity_to_momentum(g, sys, z, u);
    auto st = evolution::make_state(g, spectral::make_field(g, spectral::real_buf(z)),
                                    spectral::make_field(g, v));
    auto res = evolution::evolve(std::move(st), 0.4, 80, sys);
    REQUIRE_FALSE(res.aborted);
    evolution::Stepper fin(g, sys);
    fin.prepare(res.final_state.zeta_hat.data(), res.final_state.v_hat.data());
    return std::make_pair(fin.surface(), fin.velocity());
  };

  // mirror data: zeta(-x), -u(-x)
  spectral::real_buf zm(g.n), um(g.n);
  for (int i = 0; i < g.n; ++i) {
    zm[i] = z0[g.reflect_index(i)];
    um[i] = -u0[g.reflect_index(i)];
  }

  const auto [za, ua] = run(z0, u0);
  const auto [zb, ub] = run(zm, um);
  double worst = 0.0;
  for (int i = 0; i < g.n; ++i) {
    worst = std::max(worst, std::fabs(zb[i] - za[g.reflect_index(i)]));
    worst = std::max(worst, std::fabs(ub[i] + ua[g.reflect_index(i)]));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("dealiasing keeps the top third of the spectrum empty") {
  const auto g = spectral::make_grid(96, 3.0);
  evolution::System sys;
  sys.dealias = true;
  spectral::real_buf zeta(g.n), u(g.n);
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> unif(-0.05, 0.05);
  for (int i = 0; i < g.n; ++i) {
    zeta[i] = 0.2 * std::cos(g.x[i] / 3.0) + unif(rng);
    u[i] = unif(rng);
  }
  const auto v = evolution::velocity_to_momentum(g, sys, zeta, u);
  auto st = evolution::make_state(g, spectral::make_field(g, zeta),
                                  spectral::make_field(g, v));
  auto res = evolution::evolve(std::move(st), 0.2, 50, sys);
  REQUIRE_FALSE(res.aborted);
  for (int j = 0; j < g.modes(); ++j)
    if (3 * j > g.n) {
      CHECK(res.final_state.zeta_hat[j] == spectral::cplx(0.0, 0.0));
      CHECK(res.final_state.v_hat[j] == spectral::cplx(0.0, 0.0));
    }
}

TEST_CASE("vanishing depth aborts the run with a partial report") {
  const auto g = spectral::make_grid(64, 2.0);
  evolution::System sys;
  spectral::real_buf zeta(g.n, 0.0), zero(g.n, 0.0);
  zeta[10] = -1.0; // h = 0 at one node
  auto st = evolution::make_state(g, spectral::make_field(g, zeta),
                                  spectral::make_field(g, zero));
  auto res = evolution::evolve(std::move(st), 1.0, 10, sys);
  CHECK(res.aborted);
  CHECK_FALSE(res.abort_reason.empty());
  CHECK(res.diagnostics.empty()); // died before the first record
}

TEST_CASE("a zero-length run reports the initial state only") {
  const auto g = spectral::make_grid(64, 2.0);
  evolution::System sys;
  spectral::real_buf zeta(g.n);
  for (int i = 0; i < g.n; ++i)
    zeta[i] = 0.1 * std::cos(g.x[i] / 2.0);
  const spectral::real_buf zero(g.n, 0.0);
  auto st = evolution::make_state(g, spectral::make_field(g, zeta),
                                  spectral::make_field(g, zero));
  evolution::EvolveOptions opts;
  opts.snapshot_times = {0.0};
  auto res = evolution::evolve(std::move(st), 0.0, 0, sys, opts);
  CHECK_FALSE(res.aborted);
  REQUIRE(res.diagnostics.size() == 1);
  CHECK(res.diagnostics[0].t == 0.0);
  CHECK(res.diagnostics[0].drift_energy == 0.0);
  REQUIRE(res.snapshots.size() == 1);
  CHECK(res.snapshots[0].zeta.size() == std::size_t(g.n));
}

TEST_CASE("the stability advisory flags too-large steps without stopping the run") {
  const auto g = spectral::make_grid(128, 1.0);
  evolution::System sys;
  spectral::real_buf zeta(g.n);
  for (int i = 0; i < g.n; ++i)
    zeta[i] = 1e-4 * std::cos(g.x[i]);
  const spectral::real_buf zero(g.n, 0.0);
  evolution::EvolveOptions opts;
  opts.warn_to_stderr = false;

  // dt = T / nt = 0.1 exceeds L/N ~ 0.008
  auto st = evolution::make_state(g, spectral::make_field(g, spectral::real_buf(zeta)),
                                  spectral::make_field(g, zero));
  auto loud = evolution::evolve(std::move(st), 0.2, 2, sys, opts);
  CHECK(loud.stability_warning);

  st = evolution::make_state(g, spectral::make_field(g, spectral::real_buf(zeta)),
                             spectral::make_field(g, zero));
  auto quiet = evolution::evolve(std::move(st), 0.2, 100, sys, opts);
  CHECK_FALSE(quiet.stability_warning);
}
