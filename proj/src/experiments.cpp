#include "gnwave/experiments.hpp"

#include "gnwave/errors.hpp"
#include "gnwave/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gnwave::experiments {

std::string scenario_name(ScenarioKind k) {
  switch (k) {
  case ScenarioKind::solitary_validation: return "solitary_validation";
  case ScenarioKind::perturbed_solitary: return "perturbed_solitary";
  case ScenarioKind::simple_wave: return "simple_wave";
  case ScenarioKind::camassa_holm: return "camassa_holm";
  case ScenarioKind::cavitation: return "cavitation";
  }
  throw std::invalid_argument("unknown scenario kind");
}

ScenarioKind parse_scenario(const std::string& name) {
  for (auto k : {ScenarioKind::solitary_validation, ScenarioKind::perturbed_solitary,
                 ScenarioKind::simple_wave, ScenarioKind::camassa_holm, ScenarioKind::cavitation})
    if (scenario_name(k) == name)
      return k;
  throw std::invalid_argument("unknown scenario '" + name + "'");
}

std::string perturbation_name(Perturbation p) {
  switch (p) {
  case Perturbation::none: return "none";
  case Perturbation::scale_u: return "scale_u";
  case Perturbation::scale_zeta: return "scale_zeta";
  case Perturbation::gauss_u: return "gauss_u";
  case Perturbation::gauss_zeta: return "gauss_zeta";
  }
  throw std::invalid_argument("unknown perturbation");
}

Perturbation parse_perturbation(const std::string& name) {
  for (auto p : {Perturbation::none, Perturbation::scale_u, Perturbation::scale_zeta,
                 Perturbation::gauss_u, Perturbation::gauss_zeta})
    if (perturbation_name(p) == name)
      return p;
  throw std::invalid_argument("unknown perturbation '" + name + "'");
}

Scenario scenario_solitary_validation(Model model, double c) {
  Scenario s;
  s.kind = ScenarioKind::solitary_validation;
  s.model = model;
  s.c = c;
  s.n = model == Model::wgn ? (1 << 10) : (1 << 9);
  s.length = 10.0;
  s.nt = 2000;
  s.t_final = 1.0;
  return s;
}

Scenario scenario_perturbed_solitary(Model model, double c, Perturbation p, double amount) {
  Scenario s;
  s.kind = ScenarioKind::perturbed_solitary;
  s.model = model;
  s.c = c;
  s.perturbation = p;
  if (p == Perturbation::scale_u || p == Perturbation::scale_zeta)
    s.lambda = amount;
  else if (p != Perturbation::none)
    s.bump = amount;
  if (c < 3.0) {
    s.n = 1 << 10;
    s.length = 10.0;
    s.nt = 2000;
    s.t_final = 10.0;
  } else if (c < 8.0) {
    s.n = 1 << 12;
    s.length = 30.0;
    s.nt = 10000;
    s.t_final = 20.0;
  } else {
    s.n = 1 << 11;
    s.length = 30.0;
    s.nt = 10000;
    s.t_final = 10.0;
    s.precond_amplification = c * c * c * c;
  }
  return s;
}

Scenario scenario_simple_wave(Model model, double delta) {
  Scenario s;
  s.kind = ScenarioKind::simple_wave;
  s.model = model;
  s.delta = delta;
  s.x0 = -3.0;
  if (delta >= 0.05) {
    s.n = model == Model::wgn ? (1 << 11) : (1 << 10);
    s.length = 3.0;
    s.nt = 10000;
    s.t_final = 5.0;
  } else {
    s.n = 1 << 12;
    s.length = 2.5;
    s.nt = 10000;
    s.t_final = 1.3;
  }
  return s;
}

Scenario scenario_camassa_holm(double delta2) {
  Scenario s;
  s.kind = ScenarioKind::camassa_holm;
  s.model = Model::sgn;
  s.delta = std::sqrt(delta2);
  s.n = 1 << 11;
  s.length = 5.0;
  s.nt = 10000;
  s.t_final = 10.0;
  s.dealias = true;
  return s;
}

Scenario scenario_cavitation() {
  Scenario s;
  s.kind = ScenarioKind::cavitation;
  s.model = Model::sgn;
  s.n = 1 << 12;
  s.length = 2.5;
  s.nt = 10000;
  s.t_final = 3.0;
  s.dealias = true;
  return s;
}

System make_system(const Scenario& s) {
  System sys;
  sys.model = s.model;
  sys.delta = s.delta;
  sys.dealias = s.dealias;
  sys.precond_amplification = s.precond_amplification;
  return sys;
}

namespace {

InitialData with_momentum(const Grid& g, const System& sys, real_buf zeta, real_buf u) {
  InitialData d;
  d.v = evolution::velocity_to_momentum(g, sys, zeta, u);
  d.zeta = std::move(zeta);
  d.u = std::move(u);
  return d;
}

solitary::SolitaryWave base_wave(const Grid& g, const Scenario& s) {
  solitary::NewtonOptions opts;
  opts.tol = 1e-12;
  opts.precond_amplification = s.precond_amplification;
  try {
    return solitary::newton_solve(g, s.c, s.model, opts);
  } catch (const ConvergenceError&) {
    // ramp the velocity up when the direct seed is out of reach
    std::vector<double> targets;
    for (double f : {0.25, 0.5, 0.75, 1.0})
      if (1.0 + (s.c - 1.0) * f > 1.05)
        targets.push_back(1.0 + (s.c - 1.0) * f);
    auto cont = solitary::continuation(g, targets, s.model, opts);
    if (!cont.completed)
      throw ConvergenceError("no solitary wave at c = " + std::to_string(cont.failed_c) + ": " +
                                 cont.failure,
                             {});
    return std::move(cont.waves.back());
  }
}

} // namespace

InitialData ic_perturbed_solitary(const Grid& g, const Scenario& s) {
  const System sys = make_system(s);
  Field zeta_f, u_f;
  if (s.model == Model::sgn) {
    auto ex = solitary::sgn_solitary(g, s.c);
    zeta_f = std::move(ex.zeta);
    u_f = std::move(ex.u);
  } else {
    auto w = base_wave(g, s);
    zeta_f = std::move(w.zeta);
    u_f = std::move(w.u);
  }
  if (s.shift != 0.0) {
    zeta_f = spectral::shift_field(zeta_f, -s.shift);
    u_f = spectral::shift_field(u_f, -s.shift);
  }
  real_buf zeta = zeta_f.values;
  real_buf u = u_f.values;
  switch (s.perturbation) {
  case Perturbation::none: break;
  case Perturbation::scale_u:
    for (auto& e : u)
      e *= s.lambda;
    break;
  case Perturbation::scale_zeta:
    for (auto& e : zeta)
      e *= s.lambda;
    break;
  case Perturbation::gauss_u:
    for (int i = 0; i < g.n; ++i) {
      const double y = g.x[i] + s.shift;
      u[i] += s.bump * std::exp(-y * y);
    }
    break;
  case Perturbation::gauss_zeta:
    for (int i = 0; i < g.n; ++i) {
      const double y = g.x[i] + s.shift;
      zeta[i] += s.bump * std::exp(-y * y);
    }
    break;
  }
  return with_momentum(g, sys, std::move(zeta), std::move(u));
}

InitialData ic_simple_wave(const Grid& g, double x0, const System& sys) {
  real_buf zeta(g.n), u(g.n);
  for (int i = 0; i < g.n; ++i) {
    const double y = g.x[i] - x0;
    zeta[i] = std::exp(-y * y);
    u[i] = 2.0 * std::sqrt(1.0 + zeta[i]) - 2.0;
  }
  return with_momentum(g, sys, std::move(zeta), std::move(u));
}

InitialData ic_camassa_holm(const Grid& g, double delta, const System& sys) {
  const double d2 = delta * delta;
  real_buf w0(g.n);
  for (int i = 0; i < g.n; ++i)
    w0[i] = -g.x[i] * std::exp(-g.x[i] * g.x[i]);

  const auto ddx = spectral::make_deriv_symbol(g, Model::sgn, 1.0);
  spectral::cplx_buf spec(g.modes());
  auto second_derivative = [&](const real_buf& f, real_buf& out) {
    g.fft->forward(f.data(), spec.data());
    for (int j = 0; j < g.modes(); ++j)
      spec[j] *= -ddx.m[j] * ddx.m[j];
    g.fft->inverse(spec.data(), out.data());
  };
  auto first_derivative = [&](const real_buf& f, real_buf& out) {
    g.fft->forward(f.data(), spec.data());
    kernels::apply_imag_symbol(spec.size(), ddx.m.data(), spec.data());
    g.fft->inverse(spec.data(), out.data());
  };

  real_buf w0xx(g.n), u(g.n);
  second_derivative(w0, w0xx);
  for (int i = 0; i < g.n; ++i)
    u[i] = w0[i] + d2 / 12.0 * w0xx[i] + d2 / 6.0 * w0[i] * w0xx[i];

  real_buf uxx(g.n), ux(g.n), a(g.n), axx(g.n), zeta(g.n);
  second_derivative(u, uxx);
  first_derivative(u, ux);
  for (int i = 0; i < g.n; ++i)
    a[i] = u[i] + 0.75 * u[i] * u[i];
  second_derivative(a, axx);
  for (int i = 0; i < g.n; ++i)
    zeta[i] = u[i] + 0.25 * u[i] * u[i] - d2 / 6.0 * axx[i] - d2 / 6.0 * u[i] * uxx[i] -
              5.0 * d2 / 48.0 * ux[i] * ux[i];
  return with_momentum(g, sys, std::move(zeta), std::move(u));
}

InitialData ic_cavitation(const Grid& g, const System& sys) {
  real_buf zeta(g.n), u(g.n);
  for (int i = 0; i < g.n; ++i) {
    const double x = g.x[i];
    zeta[i] = -0.9 * std::exp(-x * x);
    u[i] = -x * std::exp(-x * x);
  }
  return with_momentum(g, sys, std::move(zeta), std::move(u));
}

real_buf riemann_field(const real_buf& zeta, const real_buf& u) {
  real_buf r(zeta.size());
  for (std::size_t i = 0; i < zeta.size(); ++i)
    r[i] = u[i] + 2.0 * std::sqrt(1.0 + zeta[i]) - 2.0;
  return r;
}

namespace {

// evaluates the trigonometric interpolant (or its derivative) anywhere
class TrigEval {
public:
  TrigEval(const Field& f, bool derivative) : grid_(f.grid), coeff_(f.spectrum) {
    // stored coefficients follow the index-space DFT; fold in the phase of
    // the first node once so the sum below runs over e^{i k_j x}
    const double theta = 3.14159265358979323846 * (1.0 - 2.0 / grid_->n);
    const spectral::cplx w(std::cos(theta), std::sin(theta));
    spectral::cplx phase = w;
    for (int j = 1; j < grid_->modes(); ++j) {
      coeff_[j] *= phase;
      phase *= w;
    }
    if (derivative) {
      for (int j = 0; j < grid_->nyquist(); ++j)
        coeff_[j] *= spectral::cplx(0.0, grid_->k[j]);
      coeff_[grid_->nyquist()] = 0.0; // odd symbol convention
    }
  }

  double operator()(double x) const {
    const Grid& g = *grid_;
    const spectral::cplx rot(std::cos(x / g.length), std::sin(x / g.length));
    spectral::cplx phase(1.0, 0.0);
    double sum = coeff_[0].real();
    for (int j = 1; j < g.nyquist(); ++j) {
      phase *= rot;
      sum += 2.0 * (coeff_[j] * phase).real();
    }
    phase *= rot;
    sum += (coeff_[g.nyquist()] * phase).real();
    return sum;
  }

private:
  const Grid* grid_;
  spectral::cplx_buf coeff_;
};

} // namespace

double shock_time(const Field& r0) {
  const Grid& g = *r0.grid;
  TrigEval slope(r0, true);

  // coarse search on the grid, then golden-section refinement
  int imin = 0;
  double vmin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < g.n; ++i) {
    const double v = slope(g.x[i]);
    if (v < vmin) {
      vmin = v;
      imin = i;
    }
  }
  const double dx = g.dx();
  double a = g.x[imin] - dx;
  double b = g.x[imin] + dx;
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c1 = b - invphi * (b - a);
  double c2 = a + invphi * (b - a);
  double f1 = slope(c1), f2 = slope(c2);
  for (int it = 0; it < 200 && (b - a) > 1e-13 * dx; ++it) {
    if (f1 < f2) {
      b = c2;
      c2 = c1;
      f2 = f1;
      c1 = b - invphi * (b - a);
      f1 = slope(c1);
    } else {
      a = c1;
      c1 = c2;
      f1 = f2;
      c2 = a + invphi * (b - a);
      f2 = slope(c2);
    }
  }
  const double smin = std::min(vmin, std::min(f1, f2));
  if (smin >= 0.0)
    return std::numeric_limits<double>::infinity();
  return -1.0 / (0.75 * smin);
}

real_buf characteristic_solution(const Field& r0, double t) {
  const Grid& g = *r0.grid;
  const double ts = shock_time(r0);
  if (!(t < ts))
    throw std::invalid_argument("characteristic solution requested at or past the shock time");
  TrigEval value(r0, false);
  TrigEval slope(r0, true);

  double rmin = std::numeric_limits<double>::infinity();
  double rmax = -rmin;
  for (int i = 0; i < g.n; ++i) {
    rmin = std::min(rmin, r0.values[i]);
    rmax = std::max(rmax, r0.values[i]);
  }

  real_buf r(g.n);
  const double dx = g.dx();
  double seed = g.x[0] - (1.0 + 0.75 * value(g.x[0])) * t;
  for (int i = 0; i < g.n; ++i) {
    const double x = g.x[i];
    // the map x0 -> x0 + (1 + 3r0(x0)/4) t is strictly increasing before
    // the shock, so the root is bracketed by the extreme speeds
    double lo = x - (1.0 + 0.75 * rmax) * t - dx;
    double hi = x - (1.0 + 0.75 * rmin) * t + dx;
    double x0 = std::clamp(seed, lo, hi);
    for (int it = 0; it < 100; ++it) {
      const double f = x0 + (1.0 + 0.75 * value(x0)) * t - x;
      if (std::fabs(f) < 1e-13 * (1.0 + std::fabs(x)))
        break;
      if (f > 0.0)
        hi = x0;
      else
        lo = x0;
      const double fp = 1.0 + 0.75 * slope(x0) * t;
      double next = fp > 1e-8 ? x0 - f / fp : 0.5 * (lo + hi);
      if (next <= lo || next >= hi)
        next = 0.5 * (lo + hi);
      x0 = next;
    }
    r[i] = value(x0);
    seed = x0 + dx; // the next node's root sits roughly one cell over
  }
  return r;
}

ScenarioReport run_scenario(const Scenario& s) {
  auto grid = std::make_shared<const Grid>(spectral::make_grid(s.n, s.length));
  const Grid& g = *grid;
  const System sys = make_system(s);

  InitialData ic;
  switch (s.kind) {
  case ScenarioKind::solitary_validation: {
    Scenario base = s;
    base.perturbation = Perturbation::none;
    ic = ic_perturbed_solitary(g, base);
    break;
  }
  case ScenarioKind::perturbed_solitary: ic = ic_perturbed_solitary(g, s); break;
  case ScenarioKind::simple_wave: ic = ic_simple_wave(g, s.x0, sys); break;
  case ScenarioKind::camassa_holm: ic = ic_camassa_holm(g, s.delta, sys); break;
  case ScenarioKind::cavitation: ic = ic_cavitation(g, sys); break;
  }

  ScenarioReport rep;
  rep.scenario = s;
  rep.grid = grid;

  Field r0_field;
  if (s.kind == ScenarioKind::simple_wave) {
    r0_field = spectral::make_field(g, riemann_field(ic.zeta, ic.u));
    rep.time_of_shock = shock_time(r0_field);
  }

  auto zeta0 = spectral::make_field(g, ic.zeta);
  auto v0 = spectral::make_field(g, ic.v);
  auto state = evolution::make_state(g, zeta0, v0);

  evolution::EvolveOptions opts;
  opts.record_every = s.record_every;
  opts.snapshot_times = s.snapshot_times;
  if (opts.snapshot_times.empty()) {
    switch (s.kind) {
    case ScenarioKind::simple_wave:
      opts.snapshot_times = {0.0, 0.5, s.t_final};
      break;
    case ScenarioKind::cavitation: opts.snapshot_times = {1.0, 2.0, 2.5, s.t_final}; break;
    default: opts.snapshot_times = {s.t_final}; break;
    }
  }

  // track the steepness of the surface at every record
  spectral::cplx_buf dspec(g.modes());
  real_buf dzeta(g.n);
  const auto ddx = spectral::make_deriv_symbol(g, Model::sgn, 1.0);
  opts.hook = [&](const evolution::DiagRecord& rec, const real_buf& zeta, const real_buf&) {
    g.fft->forward(zeta.data(), dspec.data());
    kernels::apply_imag_symbol(dspec.size(), ddx.m.data(), dspec.data());
    g.fft->inverse(dspec.data(), dzeta.data());
    rep.gradient_series.emplace_back(rec.t, kernels::max_abs(g.n, dzeta.data()));
  };

  rep.run = evolution::evolve(std::move(state), s.nt == 0 ? 0.0 : s.t_final, s.nt, sys, opts);

  if (s.kind == ScenarioKind::simple_wave) {
    for (const auto& snap : rep.run.snapshots) {
      RiemannSnapshot rs;
      rs.t = snap.t;
      rs.r = riemann_field(snap.zeta, snap.u);
      if (snap.t > 0.0 && snap.t < 0.95 * rep.time_of_shock) {
        rs.r_oracle = characteristic_solution(r0_field, snap.t);
        rs.has_oracle = true;
        double err = 0.0;
        for (int i = 0; i < g.n; ++i)
          err = std::max(err, std::fabs(rs.r[i] - rs.r_oracle[i]));
        rs.sup_error = err;
      }
      rep.riemann.push_back(std::move(rs));
    }
  }

  if (s.kind == ScenarioKind::perturbed_solitary && !rep.run.diagnostics.empty()) {
    const double t0 = rep.run.diagnostics.front().t;
    const double t1 = rep.run.diagnostics.back().t;
    const double width = 1.0;
    for (const auto& rec : rep.run.diagnostics) {
      const int w = static_cast<int>((rec.t - t0) / width);
      if (w >= static_cast<int>(rep.windows.size())) {
        WindowStat ws;
        ws.t0 = t0 + w * width;
        ws.t1 = ws.t0 + width;
        ws.min_zeta_inf = ws.max_zeta_inf = rec.zeta_inf;
        rep.windows.resize(w + 1, ws);
      }
      auto& ws = rep.windows[w];
      ws.min_zeta_inf = std::min(ws.min_zeta_inf, rec.zeta_inf);
      ws.max_zeta_inf = std::max(ws.max_zeta_inf, rec.zeta_inf);
    }
    // settling: the last quarter's spread must drop well below the
    // amplitude of the initial transient
    double first_amp = rep.windows.front().amplitude();
    double mean = 0.0;
    int count = 0;
    for (const auto& rec : rep.run.diagnostics)
      if (rec.t >= t1 - 0.25 * (t1 - t0)) {
        mean += rec.zeta_inf;
        ++count;
      }
    if (count > 1) {
      mean /= count;
      double var = 0.0;
      for (const auto& rec : rep.run.diagnostics)
        if (rec.t >= t1 - 0.25 * (t1 - t0))
          var += (rec.zeta_inf - mean) * (rec.zeta_inf - mean);
      const double sd = std::sqrt(var / (count - 1));
      rep.settled = sd <= std::max(0.1 * first_amp, 1e-12);
    }
  }

  return rep;
}

} // namespace gnwave::experiments
