#include "gnwave/evolution.hpp"

#include "gnwave/errors.hpp"
#include "gnwave/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace gnwave::evolution {

namespace {

std::size_t reals(const Grid& g) { return 2 * static_cast<std::size_t>(g.modes()); }

double* as_doubles(cplx* z) { return reinterpret_cast<double*>(z); }

} // namespace

State make_state(const Grid& g, const Field& zeta, const Field& v, double t) {
  if (zeta.grid != &g || v.grid != &g)
    throw std::invalid_argument("state fields must live on the given grid");
  State s;
  s.grid = &g;
  s.t = t;
  s.zeta_hat = zeta.spectrum;
  s.v_hat = v.spectrum;
  return s;
}

real_buf velocity_to_momentum(const Grid& g, const System& sys, const real_buf& zeta,
                              const real_buf& u) {
  const int n = g.n;
  const auto sym = spectral::make_deriv_symbol(g, sys.model, sys.delta);
  cplx_buf spec(g.modes());
  real_buf du(n), w(n), dw(n), v(n);
  g.fft->forward(u.data(), spec.data());
  kernels::apply_imag_symbol(spec.size(), sym.m.data(), spec.data());
  g.fft->inverse(spec.data(), du.data());
  for (int i = 0; i < n; ++i) {
    const double h = 1.0 + zeta[i];
    w[i] = h * h * h * du[i];
  }
  g.fft->forward(w.data(), spec.data());
  kernels::apply_imag_symbol(spec.size(), sym.m.data(), spec.data());
  g.fft->inverse(spec.data(), dw.data());
  const double d2 = sys.delta * sys.delta;
  for (int i = 0; i < n; ++i) {
    const double h = 1.0 + zeta[i];
    v[i] = u[i] - d2 / (3.0 * h) * dw[i];
  }
  return v;
}

Conserved conserved(const Grid& g, const System& sys, const real_buf& zeta, const real_buf& u,
                    const real_buf& v) {
  const int n = g.n;
  const auto sym = spectral::make_deriv_symbol(g, sys.model, sys.delta);
  cplx_buf spec(g.modes());
  real_buf du(n), dens(n);
  g.fft->forward(u.data(), spec.data());
  kernels::apply_imag_symbol(spec.size(), sym.m.data(), spec.data());
  g.fft->inverse(spec.data(), du.data());
  const double d2 = sys.delta * sys.delta;
  Conserved q;
  q.mass = spectral::integral(g, zeta);
  for (int i = 0; i < n; ++i)
    dens[i] = (1.0 + zeta[i]) * u[i];
  q.momentum = spectral::integral(g, dens);
  for (int i = 0; i < n; ++i) {
    const double h = 1.0 + zeta[i];
    dens[i] = zeta[i] * zeta[i] + h * u[i] * u[i] + d2 / 3.0 * h * h * h * du[i] * du[i];
  }
  q.energy = spectral::integral(g, dens);
  q.impulse = spectral::integral(g, v);
  return q;
}

EllipticSolver::EllipticSolver(const Grid& g, const System& sys)
    : grid_(&g), sys_(sys), sym_(spectral::make_deriv_symbol(g, sys.model, sys.delta)),
      precond_(g.modes()), warm_(g.n, 0.0) {
  const double amp = sys.precond_amplification;
  const double d2 = sys.delta * sys.delta;
  for (int j = 0; j < g.modes(); ++j) {
    const double k = g.k[j];
    precond_[j] = 1.0 / (1.0 + amp * d2 * k * k / 3.0);
  }
}

void EllipticSolver::reset() {
  have_warm_ = false;
  std::fill(warm_.begin(), warm_.end(), 0.0);
}

krylov::SolveStats EllipticSolver::solve(const real_buf& h, const real_buf& v, real_buf& u) {
  const Grid& g = *grid_;
  const int n = g.n;
  const double d2 = sys_.delta * sys_.delta;

  real_buf h3(n), c1(n);
  for (int i = 0; i < n; ++i) {
    h3[i] = h[i] * h[i] * h[i];
    c1[i] = d2 / (3.0 * h[i]);
  }

  // scratch shared across applications; the solver runs serially
  cplx_buf spec(g.modes());
  real_buf dw(n), w3(n);

  krylov::LinearOperator op;
  op.n = static_cast<std::size_t>(n);
  op.thread_safe = false;
  op.apply = [&](const double* in, double* out) {
    g.fft->forward(in, spec.data());
    kernels::apply_imag_symbol(spec.size(), sym_.m.data(), spec.data());
    g.fft->inverse(spec.data(), dw.data());
    kernels::mul(n, h3.data(), dw.data(), w3.data());
    g.fft->forward(w3.data(), spec.data());
    kernels::apply_imag_symbol(spec.size(), sym_.m.data(), spec.data());
    g.fft->inverse(spec.data(), dw.data());
    for (int i = 0; i < n; ++i)
      out[i] = in[i] - c1[i] * dw[i];
  };

  cplx_buf pspec(g.modes());
  krylov::Preconditioner prec;
  prec.apply = [&](const double* in, double* out) {
    g.fft->forward(in, pspec.data());
    kernels::apply_real_symbol(pspec.size(), precond_.data(), pspec.data());
    g.fft->inverse(pspec.data(), out);
  };

  u = have_warm_ ? warm_ : v;
  krylov::GmresOptions opts;
  opts.tol = sys_.gmres_tol;
  opts.max_iter = sys_.gmres_max_iter;
  auto stats = krylov::gmres(op, v.data(), u.data(), opts, &prec);
  if (!stats.converged && stats.relative_residual > 1e-10)
    throw ConvergenceError("velocity solve did not converge", stats.history);
  warm_ = u;
  have_warm_ = true;
  total_iterations_ += stats.iterations;
  return stats;
}

real_buf solve_velocity(const Grid& g, const System& sys, const real_buf& zeta, const real_buf& v,
                        krylov::SolveStats* stats) {
  real_buf h(g.n), u(g.n);
  for (int i = 0; i < g.n; ++i)
    h[i] = 1.0 + zeta[i];
  EllipticSolver solver(g, sys);
  auto st = solver.solve(h, v, u);
  if (stats)
    *stats = st;
  return u;
}

Stepper::Stepper(const Grid& g, const System& sys)
    : grid_(&g), sys_(sys), disp_(spectral::make_deriv_symbol(g, sys.model, sys.delta)),
      nddx_(spectral::make_deriv_symbol(g, Model::sgn, 1.0)), elliptic_(g, sys), zeta_(g.n),
      v_(g.n), h_(g.n), u_(g.n), du_(g.n), flux_(g.n), t1_(g.n), t2_(g.n), spec_(g.modes()),
      k1z_(g.modes()), k1v_(g.modes()), k2z_(g.modes()), k2v_(g.modes()), k3z_(g.modes()),
      k3v_(g.modes()), k4z_(g.modes()), k4v_(g.modes()), sz_(g.modes()), sv_(g.modes()) {
  for (auto& m : nddx_.m)
    m = -m;
}

void Stepper::prepare(const cplx* zeta_hat, const cplx* v_hat) {
  const Grid& g = *grid_;
  const int n = g.n;
  g.fft->inverse(zeta_hat, zeta_.data());
  g.fft->inverse(v_hat, v_.data());
  double minh = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    h_[i] = 1.0 + zeta_[i];
    minh = std::min(minh, h_[i]);
  }
  min_depth_ = minh;
  if (minh <= 0.0)
    throw CavitationError("water depth reached zero", minh);
  elliptic_.solve(h_, v_, u_);
  g.fft->forward(u_.data(), spec_.data());
  kernels::apply_imag_symbol(spec_.size(), disp_.m.data(), spec_.data());
  g.fft->inverse(spec_.data(), du_.data());
}

void Stepper::rhs(const cplx* zeta_hat, const cplx* v_hat, cplx* dzeta_hat, cplx* dv_hat) {
  const Grid& g = *grid_;
  const int n = g.n;
  prepare(zeta_hat, v_hat);

  // surface equation: d(zeta)/dt = -d(h u)/dx
  kernels::mul(n, h_.data(), u_.data(), flux_.data());
  g.fft->forward(flux_.data(), dzeta_hat);
  kernels::apply_imag_symbol(static_cast<std::size_t>(g.modes()), nddx_.m.data(), dzeta_hat);

  // momentum equation: d(v)/dt = -d(zeta + u v - u^2/2 - (delta^2/2) (h du)^2)/dx
  const double d2 = sys_.delta * sys_.delta;
  kernels::scale_add(n, 1.0, v_.data(), -0.5, u_.data(), t1_.data());
  kernels::mul(n, u_.data(), t1_.data(), t2_.data());
  kernels::scale_add(n, 1.0, zeta_.data(), 1.0, t2_.data(), flux_.data());
  kernels::mul(n, h_.data(), du_.data(), t1_.data());
  kernels::mul(n, t1_.data(), t1_.data(), t2_.data());
  kernels::axpy(n, -0.5 * d2, t2_.data(), flux_.data());
  g.fft->forward(flux_.data(), dv_hat);
  kernels::apply_imag_symbol(static_cast<std::size_t>(g.modes()), nddx_.m.data(), dv_hat);

  if (sys_.dealias) {
    spectral::dealias_two_thirds(g, dzeta_hat);
    spectral::dealias_two_thirds(g, dv_hat);
  }
}

void Stepper::step(State& s, double dt) {
  const Grid& g = *grid_;
  const std::size_t m = reals(g);
  double* z = as_doubles(s.zeta_hat.data());
  double* v = as_doubles(s.v_hat.data());

  rhs(s.zeta_hat.data(), s.v_hat.data(), k1z_.data(), k1v_.data());
  kernels::scale_add(m, 1.0, z, 0.5 * dt, as_doubles(k1z_.data()), as_doubles(sz_.data()));
  kernels::scale_add(m, 1.0, v, 0.5 * dt, as_doubles(k1v_.data()), as_doubles(sv_.data()));
  rhs(sz_.data(), sv_.data(), k2z_.data(), k2v_.data());
  kernels::scale_add(m, 1.0, z, 0.5 * dt, as_doubles(k2z_.data()), as_doubles(sz_.data()));
  kernels::scale_add(m, 1.0, v, 0.5 * dt, as_doubles(k2v_.data()), as_doubles(sv_.data()));
  rhs(sz_.data(), sv_.data(), k3z_.data(), k3v_.data());
  kernels::scale_add(m, 1.0, z, dt, as_doubles(k3z_.data()), as_doubles(sz_.data()));
  kernels::scale_add(m, 1.0, v, dt, as_doubles(k3v_.data()), as_doubles(sv_.data()));
  rhs(sz_.data(), sv_.data(), k4z_.data(), k4v_.data());

  kernels::rk4_combine(m, z, dt / 6.0, as_doubles(k1z_.data()), as_doubles(k2z_.data()),
                       as_doubles(k3z_.data()), as_doubles(k4z_.data()), z);
  kernels::rk4_combine(m, v, dt / 6.0, as_doubles(k1v_.data()), as_doubles(k2v_.data()),
                       as_doubles(k3v_.data()), as_doubles(k4v_.data()), v);
  s.t += dt;
}

namespace {

struct DriftScales {
  double mass = 1.0, momentum = 1.0, energy = 1.0, impulse = 1.0;
};

double drift_scale(double i0, double abs0) {
  return std::max({std::fabs(i0), abs0, 1e-300});
}

} // namespace

EvolveResult evolve(State initial, double t_final, int steps, const System& sys,
                    const EvolveOptions& opts) {
  if (!initial.grid)
    throw std::invalid_argument("state has no grid");
  if (steps < 0)
    throw std::invalid_argument("negative step count");
  const Grid& g = *initial.grid;
  if (t_final < initial.t)
    throw std::invalid_argument("final time precedes initial time");
  if (t_final > initial.t && steps < 1)
    throw std::invalid_argument("advancing in time needs at least one step");
  const bool static_run = !(t_final > initial.t);
  const double dt = static_run ? 0.0 : (t_final - initial.t) / steps;

  EvolveResult res;
  if (opts.stability_budget > 0.0 && dt > opts.stability_budget * g.length / g.n) {
    res.stability_warning = true;
    if (opts.warn_to_stderr)
      std::fprintf(stderr, "warning: dt = %.3e exceeds the advisory step %.3e for this grid\n", dt,
                   opts.stability_budget * g.length / g.n);
  }

  State s = std::move(initial);
  if (sys.dealias) {
    spectral::dealias_two_thirds(g, s.zeta_hat.data());
    spectral::dealias_two_thirds(g, s.v_hat.data());
  }

  std::vector<double> snaps = opts.snapshot_times;
  std::sort(snaps.begin(), snaps.end());
  std::size_t snap_idx = 0;

  Stepper st(g, sys);
  Conserved q0;
  DriftScales scale;
  bool have_base = false;
  real_buf dens(g.n);

  auto record = [&](double t) {
    const Conserved q = conserved(g, sys, st.surface(), st.velocity(), st.momentum());
    if (!have_base) {
      q0 = q;
      const auto& zeta = st.surface();
      const auto& u = st.velocity();
      const auto& v = st.momentum();
      for (int i = 0; i < g.n; ++i)
        dens[i] = std::fabs(zeta[i]);
      scale.mass = drift_scale(q.mass, spectral::integral(g, dens));
      for (int i = 0; i < g.n; ++i)
        dens[i] = std::fabs((1.0 + zeta[i]) * u[i]);
      scale.momentum = drift_scale(q.momentum, spectral::integral(g, dens));
      // the energy density is nonnegative while the depth stays positive
      scale.energy = drift_scale(q.energy, std::fabs(q.energy));
      for (int i = 0; i < g.n; ++i)
        dens[i] = std::fabs(v[i]);
      scale.impulse = drift_scale(q.impulse, spectral::integral(g, dens));
      have_base = true;
    }
    DiagRecord r;
    r.t = t;
    r.q = q;
    r.drift_mass = std::fabs(q.mass - q0.mass) / scale.mass;
    r.drift_momentum = std::fabs(q.momentum - q0.momentum) / scale.momentum;
    r.drift_energy = std::fabs(q.energy - q0.energy) / scale.energy;
    r.drift_impulse = std::fabs(q.impulse - q0.impulse) / scale.impulse;
    r.zeta_inf = kernels::max_abs(g.n, st.surface().data());
    r.u_inf = kernels::max_abs(g.n, st.velocity().data());
    r.min_depth = st.min_depth();
    res.diagnostics.push_back(r);
    if (opts.hook)
      opts.hook(r, st.surface(), st.velocity());
  };

  auto take_snapshots = [&](double t) {
    while (snap_idx < snaps.size() && snaps[snap_idx] <= t + 0.5 * dt) {
      Snapshot snap;
      snap.t = t;
      snap.zeta = st.surface();
      snap.u = st.velocity();
      snap.zeta_hat = s.zeta_hat;
      snap.u_hat.resize(g.modes());
      g.fft->forward(st.velocity().data(), snap.u_hat.data());
      res.snapshots.push_back(std::move(snap));
      ++snap_idx;
    }
  };

  try {
    st.prepare(s.zeta_hat.data(), s.v_hat.data());
    record(s.t);
    take_snapshots(s.t);
    const double t0 = s.t;
    for (int k = 1; !static_run && k <= steps; ++k) {
      st.step(s, dt);
      // recompute from the step index so roundoff does not accumulate in t
      s.t = t0 + k * dt;
      const bool due = (opts.record_every > 0 && k % opts.record_every == 0) || k == steps;
      if (due || snap_idx < snaps.size()) {
        st.prepare(s.zeta_hat.data(), s.v_hat.data());
        if (due)
          record(s.t);
        take_snapshots(s.t);
      }
    }
  } catch (const NumericalError& e) {
    res.aborted = true;
    res.abort_reason = e.what();
  }

  res.final_state = std::move(s);
  res.elliptic_iterations = st.elliptic_iterations();
  return res;
}

} // namespace gnwave::evolution
