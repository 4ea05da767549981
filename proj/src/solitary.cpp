#include "gnwave/solitary.hpp"

#include "gnwave/errors.hpp"
#include "gnwave/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gnwave::solitary {

using spectral::cplx;
using spectral::cplx_buf;
using spectral::DerivSymbol;

std::string backend_name(Backend b) { return b == Backend::gmres ? "gmres" : "lu"; }

Backend parse_backend(const std::string& s) {
  if (s == "gmres")
    return Backend::gmres;
  if (s == "lu")
    return Backend::lu;
  throw std::invalid_argument("unknown backend '" + s + "' (expected gmres or lu)");
}

ExplicitWave sgn_solitary(const Grid& g, double c) {
  if (!(c > 1.0))
    throw std::invalid_argument("sgn_solitary: requires c > 1");
  const double amp = c * c - 1.0;
  const double alpha = 0.5 * std::sqrt(3.0) * std::sqrt(amp) / c;
  real_buf zeta(g.n), u(g.n), eta(g.n);
  for (int i = 0; i < g.n; ++i) {
    const double s = 1.0 / std::cosh(alpha * g.x[i]);
    const double z = amp * s * s;
    zeta[i] = z;
    u[i] = c * z / (1.0 + z);
    eta[i] = z / (1.0 + z);
  }
  ExplicitWave w;
  w.zeta = spectral::make_field(g, std::move(zeta));
  w.u = spectral::make_field(g, std::move(u));
  w.eta = spectral::make_field(g, std::move(eta));
  return w;
}

namespace {

void check_eta_range(const real_buf& eta, double guard, const char* who) {
  double worst = -1.0;
  for (double e : eta)
    worst = std::max(worst, e);
  if (!(worst < 1.0 - guard))
    throw CavitationError(std::string(who) + ": surface iterate out of range, max eta = " +
                              std::to_string(worst),
                          worst);
}

} // namespace

ProfileFields eta_to_fields(const Field& eta, double c, double guard) {
  const Grid& g = *eta.grid;
  check_eta_range(eta.values, guard, "eta_to_fields");
  real_buf zeta(g.n), u(g.n), h(g.n);
  for (int i = 0; i < g.n; ++i) {
    const double e = eta.values[i];
    const double a = 1.0 - e;
    zeta[i] = e / a;
    u[i] = c * e;
    h[i] = 1.0 / a;
  }
  ProfileFields f;
  f.zeta = spectral::make_field(g, std::move(zeta));
  f.u = spectral::make_field(g, std::move(u));
  f.h = spectral::make_field(g, std::move(h));
  return f;
}

Field traveling_residual(const Field& eta, double c, Model model, double guard) {
  const Grid& g = *eta.grid;
  check_eta_range(eta.values, guard, "traveling_residual");
  const DerivSymbol sym = spectral::make_deriv_symbol(g, model, 1.0);

  const Field de = spectral::apply_deriv(eta, sym);
  real_buf q(g.n);
  for (int i = 0; i < g.n; ++i) {
    const double a = 1.0 - eta.values[i];
    q[i] = de.values[i] / (a * a * a);
  }
  const Field dq = spectral::apply_deriv(spectral::make_field(g, std::move(q)), sym);

  const double ic2 = 1.0 / (c * c);
  real_buf r(g.n);
  for (int i = 0; i < g.n; ++i) {
    const double e = eta.values[i];
    const double a = 1.0 - e;
    const double d = de.values[i];
    r[i] = -(a * a / 3.0) * dq.values[i] + 0.5 * d * d / (a * a) + e - ic2 * e / a - 0.5 * e * e;
  }
  return spectral::make_field(g, std::move(r));
}

Field surface_residual_check(const Field& zeta, double c, Model model) {
  const Grid& g = *zeta.grid;
  const DerivSymbol sym = spectral::make_deriv_symbol(g, model, 1.0);

  real_buf h(g.n), eta(g.n);
  double minh = 1e300;
  for (int i = 0; i < g.n; ++i) {
    h[i] = 1.0 + zeta.values[i];
    minh = std::min(minh, h[i]);
    eta[i] = zeta.values[i] / h[i];
  }
  if (!(minh > 0.0))
    throw CavitationError("surface_residual_check: vanishing depth, min h = " + std::to_string(minh),
                          minh);

  const Field deta = spectral::apply_deriv(spectral::make_field(g, std::move(eta)), sym);
  real_buf q(g.n);
  for (int i = 0; i < g.n; ++i)
    q[i] = h[i] * h[i] * h[i] * deta.values[i];
  const Field dq = spectral::apply_deriv(spectral::make_field(g, std::move(q)), sym);

  const double ic2 = 1.0 / (c * c);
  real_buf r(g.n);
  for (int i = 0; i < g.n; ++i) {
    const double z = zeta.values[i];
    const double hh = h[i];
    const double d = deta.values[i];
    r[i] = -dq.values[i] / (3.0 * hh * hh) + 0.5 * hh * hh * d * d + z / hh - ic2 * z -
           0.5 * z * z / (hh * hh);
  }
  return spectral::make_field(g, std::move(r));
}

TravelingJacobian::TravelingJacobian(const Field& eta, double c, Model model)
    : grid_(eta.grid), sym_(spectral::make_deriv_symbol(*eta.grid, model, 1.0)) {
  const Grid& g = *grid_;
  const Field de = spectral::apply_deriv(eta, sym_);

  real_buf q(g.n);
  for (int i = 0; i < g.n; ++i) {
    const double a = 1.0 - eta.values[i];
    q[i] = de.values[i] / (a * a * a);
  }
  const Field g1 = spectral::apply_deriv(spectral::make_field(g, std::move(q)), sym_);

  diag0_.resize(g.n);
  diag1_.resize(g.n);
  m1_.resize(g.n);
  m2_.resize(g.n);
  a2_.resize(g.n);
  const double ic2 = 1.0 / (c * c);
  for (int i = 0; i < g.n; ++i) {
    const double e = eta.values[i];
    const double a = 1.0 - e;
    const double a2 = a * a;
    const double d = de.values[i];
    diag0_[i] = (2.0 / 3.0) * a * g1.values[i] + d * d / (a2 * a) + 1.0 - ic2 / a2 - e;
    diag1_[i] = d / a2;
    m1_[i] = d / (a2 * a2);
    m2_[i] = 1.0 / (a2 * a);
    a2_[i] = a2;
  }
}

void TravelingJacobian::apply(const double* w, double* out) const {
  const Grid& g = *grid_;
  const int n = g.n;
  const int m = g.modes();
  const spectral::Fft& fft = *g.fft;

  real_buf dw(n), t(n), s1(n), s2(n);
  cplx_buf spec(m);

  fft.forward(w, spec.data());
  spectral::apply_deriv_spectrum(sym_, spec.data());
  fft.inverse(spec.data(), dw.data());

  // D(m1 .* w)
  kernels::mul(n, m1_.data(), w, t.data());
  fft.forward(t.data(), spec.data());
  spectral::apply_deriv_spectrum(sym_, spec.data());
  fft.inverse(spec.data(), s1.data());

  // D(m2 .* D w)
  kernels::mul(n, m2_.data(), dw.data(), t.data());
  fft.forward(t.data(), spec.data());
  spectral::apply_deriv_spectrum(sym_, spec.data());
  fft.inverse(spec.data(), s2.data());

  for (int i = 0; i < n; ++i)
    out[i] = diag0_[i] * w[i] + diag1_[i] * dw[i] - a2_[i] * s1[i] - (a2_[i] / 3.0) * s2[i];
}

krylov::LinearOperator TravelingJacobian::as_operator() const {
  krylov::LinearOperator op;
  op.n = (std::size_t)size();
  op.apply = [this](const double* in, double* out) { apply(in, out); };
  op.thread_safe = true;
  return op;
}

namespace {

// spectral diagonal preconditioner Diag(1 + amp * k^2 / 3)
krylov::Preconditioner make_newton_preconditioner(const Grid& g, double amp) {
  std::vector<double> p(g.modes());
  for (int j = 0; j < g.modes(); ++j)
    p[j] = 1.0 / (1.0 + amp * g.k[j] * g.k[j] / 3.0);
  krylov::Preconditioner M;
  M.apply = [&g, p = std::move(p)](const double* r, double* z) {
    cplx_buf spec(g.modes());
    g.fft->forward(r, spec.data());
    kernels::apply_real_symbol(spec.size(), p.data(), spec.data());
    g.fft->inverse(spec.data(), z);
  };
  return M;
}

Field postprocess_iterate(const Grid& g, real_buf values, const NewtonOptions& opts) {
  if (opts.symmetrize)
    spectral::even_symmetrize(g, values);
  Field f = spectral::make_field(g, std::move(values));
  if (opts.krasny_eps > 0.0)
    spectral::krasny_filter(f, opts.krasny_eps);
  return f;
}

real_buf plain_derivative(const Field& f) {
  const Grid& g = *f.grid;
  DerivSymbol dx;
  dx.m = g.k;
  dx.m[g.nyquist()] = 0.0;
  cplx_buf spec = f.spectrum;
  spectral::apply_deriv_spectrum(dx, spec.data());
  return spectral::inverse_transform(g, spec);
}

} // namespace

SolitaryWave newton_solve(const Grid& g, double c, Model model, const NewtonOptions& opts,
                          const Field* initial) {
  if (!(c > 1.0))
    throw std::invalid_argument("newton_solve: requires c > 1");
  const bool kernel_shift = opts.kernel_shift.value_or(opts.backend == Backend::lu);

  Field eta = initial ? *initial : sgn_solitary(g, c).eta;
  if (!initial)
    eta = postprocess_iterate(g, std::move(eta.values), opts);

  Field res = traveling_residual(eta, c, model, opts.guard);
  double rnorm = spectral::norm_inf(res.values);
  std::vector<double> history{rnorm};
  std::vector<int> gmres_iters;

  // eta = 0 solves the profile equation exactly; an iteration drifting
  // there has lost the wave (typical of under-resolved grids), so any
  // iterate far below the explicit-wave amplitude is rejected
  const double collapse_tol = 0.01 * (1.0 - 1.0 / (c * c));

  const krylov::Preconditioner M = make_newton_preconditioner(g, opts.precond_amplification);

  int iters = 0;
  bool at_floor = false;
  while (rnorm > opts.tol && iters < opts.max_iter) {
    const TravelingJacobian jac(eta, c, model);

    real_buf w; // translation-direction kernel shift
    double beta = 0.0;
    if (kernel_shift)
      w = plain_derivative(eta);

    std::vector<double> delta(g.n, 0.0);
    if (opts.backend == Backend::gmres) {
      krylov::LinearOperator op = jac.as_operator();
      if (kernel_shift) {
        beta = std::max(1.0, spectral::norm_inf(jac.pointwise_diagonal()));
        const double ww = kernels::dot(w.size(), w.data(), w.data());
        if (ww > 0.0) {
          op.apply = [&jac, &w, beta, ww](const double* in, double* out) {
            jac.apply(in, out);
            const double proj = kernels::dot(w.size(), w.data(), in) * beta / ww;
            kernels::axpy(w.size(), proj, w.data(), out);
          };
          op.thread_safe = false;
        }
      }
      const krylov::SolveStats st = krylov::gmres(op, res.values.data(), delta.data(), opts.gmres, &M);
      gmres_iters.push_back(st.iterations);
    } else {
      krylov::DenseMatrix J = krylov::assemble_dense(jac.as_operator());
      if (kernel_shift) {
        for (std::size_t i = 0; i < J.n; ++i)
          beta = std::max(beta, std::fabs(J.at(i, i)));
        krylov::add_rank_one(J, w, beta);
      }
      delta = krylov::lu_solve(J, res.values);
    }

    // step with halving until the residual actually decreases
    bool accepted = false;
    for (double step = 1.0; step >= 1.0 / 16.0; step *= 0.5) {
      real_buf trial(g.n);
      kernels::scale_add(g.n, 1.0, eta.values.data(), -step, delta.data(), trial.data());
      Field teta = postprocess_iterate(g, std::move(trial), opts);
      if (spectral::norm_inf(teta.values) >= 1.0 ||
          *std::max_element(teta.values.begin(), teta.values.end()) >= 1.0 - opts.guard)
        continue;
      Field tres;
      try {
        tres = traveling_residual(teta, c, model, opts.guard);
      } catch (const CavitationError&) {
        continue;
      }
      const double tnorm = spectral::norm_inf(tres.values);
      // a step that shaves off less than a tenth of the residual is floor
      // noise, not progress; rejecting it keeps the iteration count honest
      if (tnorm < 0.9 * rnorm) {
        eta = std::move(teta);
        res = std::move(tres);
        rnorm = tnorm;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // residual no longer decreases: a floor close enough to the target
      // is accepted as converged-to-floor, anything else is a failure
      if (rnorm <= opts.stagnation_accept) {
        at_floor = true;
        break;
      }
      throw ConvergenceError("newton_solve: residual stalled at " + std::to_string(rnorm) +
                                 " for c = " + std::to_string(c),
                             history);
    }
    ++iters;
    history.push_back(rnorm);
    if (spectral::norm_inf(eta.values) < collapse_tol)
      throw ConvergenceError("newton_solve: iterate collapsed to the flat state for c = " +
                                 std::to_string(c),
                             history);
  }

  if (spectral::norm_inf(eta.values) < collapse_tol)
    throw ConvergenceError("newton_solve: iterate collapsed to the flat state for c = " +
                               std::to_string(c),
                           history);
  if (rnorm > opts.tol && !at_floor)
    throw ConvergenceError("newton_solve: no convergence within " + std::to_string(opts.max_iter) +
                               " iterations for c = " + std::to_string(c) + ", residual " +
                               std::to_string(rnorm),
                           history);

  SolitaryWave wave;
  wave.c = c;
  wave.model = model;
  wave.backend = opts.backend;
  wave.grid = &g;
  wave.residual_norm = rnorm;
  wave.newton_iterations = iters;
  wave.at_floor = at_floor;
  wave.residual_history = std::move(history);
  wave.gmres_iterations = std::move(gmres_iters);
  ProfileFields pf = eta_to_fields(eta, c, opts.guard);
  wave.eta = std::move(eta);
  wave.zeta = std::move(pf.zeta);
  wave.u = std::move(pf.u);
  wave.h = std::move(pf.h);
  return wave;
}

ContinuationResult continuation(const Grid& g, const std::vector<double>& targets, Model model,
                                const NewtonOptions& opts) {
  if (targets.empty())
    throw std::invalid_argument("continuation: no target velocities");
  double prev = 1.0;
  for (double c : targets) {
    if (!(c > prev))
      throw std::invalid_argument("continuation: velocities must ascend and exceed 1");
    prev = c;
  }

  ContinuationResult out;
  std::vector<double> cs;
  std::vector<real_buf> etas;

  for (double c : targets) {
    std::optional<Field> seed;
    if (!cs.empty()) {
      // extrapolate the last few profiles pointwise (degree <= 3)
      const std::size_t take = std::min<std::size_t>(cs.size(), 4);
      const std::size_t lo = cs.size() - take;
      real_buf acc(g.n, 0.0);
      for (std::size_t i = lo; i < cs.size(); ++i) {
        double weight = 1.0;
        for (std::size_t l = lo; l < cs.size(); ++l)
          if (l != i)
            weight *= (c - cs[l]) / (cs[i] - cs[l]);
        kernels::axpy(g.n, weight, etas[i].data(), acc.data());
      }
      const double top = *std::max_element(acc.begin(), acc.end());
      if (top < 1.0 - opts.guard) {
        // an extrapolation that starts further from the solution than the
        // explicit seed has failed; keep whichever residual is smaller
        Field cand = spectral::make_field(g, std::move(acc));
        const double rext =
            spectral::norm_inf(traveling_residual(cand, c, model, opts.guard).values);
        const auto ex = sgn_solitary(g, c);
        const double rexp =
            spectral::norm_inf(traveling_residual(ex.eta, c, model, opts.guard).values);
        if (rext < rexp)
          seed = std::move(cand);
      }
    }

    SolitaryWave wave;
    bool done = false;
    if (seed) {
      try {
        wave = newton_solve(g, c, model, opts, &*seed);
        done = true;
      } catch (const NumericalError&) {
        // fall back to the explicit seed below
      }
    }
    if (!done) {
      try {
        wave = newton_solve(g, c, model, opts);
      } catch (const NumericalError& err) {
        out.completed = false;
        out.failed_c = c;
        out.failure = err.what();
        return out;
      }
    }
    cs.push_back(c);
    etas.push_back(wave.eta.values);
    out.waves.push_back(std::move(wave));
  }
  return out;
}

} // namespace gnwave::solitary
