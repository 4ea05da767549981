#ifndef GNWAVE_EVOLUTION_HPP
#define GNWAVE_EVOLUTION_HPP

#include "gnwave/krylov.hpp"
#include "gnwave/model.hpp"
#include "gnwave/spectral.hpp"

#include <functional>
#include <string>
#include <vector>

namespace gnwave::evolution {

using spectral::cplx;
using spectral::cplx_buf;
using spectral::Field;
using spectral::Grid;
using spectral::real_buf;

// Time-dependent problem setup: which system, the long-wave scale delta
// (1 for the unscaled equations), dealiasing, and the elliptic-solve
// controls. gravity is normalized to 1 throughout.
struct System {
  Model model = Model::sgn;
  double delta = 1.0;
  bool dealias = false;
  double precond_amplification = 1.0; // Diag(1 + amp * delta^2 k^2 / 3)
  double gmres_tol = 1e-14;
  int gmres_max_iter = 100;
};

// Evolution state in spectral coefficients: the surface zeta and the
// modified momentum v = u - (delta^2/(3h)) D(h^3 D u), h = 1 + zeta.
struct State {
  const Grid* grid = nullptr;
  double t = 0.0;
  cplx_buf zeta_hat, v_hat;
};

State make_state(const Grid& g, const Field& zeta, const Field& v, double t = 0.0);

struct Conserved {
  double mass = 0.0;       // integral of zeta
  double momentum = 0.0;   // integral of h u
  double energy = 0.0;     // integral of zeta^2 + h u^2 + (delta^2/3) h^3 (D u)^2
  double impulse = 0.0;    // integral of v
};

// v from u (forward application of the elliptic operator)
real_buf velocity_to_momentum(const Grid& g, const System& sys, const real_buf& zeta,
                              const real_buf& u);

// u from v (GMRES inversion, cold start); stats optional
real_buf solve_velocity(const Grid& g, const System& sys, const real_buf& zeta, const real_buf& v,
                        krylov::SolveStats* stats = nullptr);

Conserved conserved(const Grid& g, const System& sys, const real_buf& zeta, const real_buf& u,
                    const real_buf& v);

// Warm-started elliptic inversion used inside the time stepper: the
// solution of the previous call seeds the next one.
class EllipticSolver {
public:
  EllipticSolver(const Grid& g, const System& sys);
  krylov::SolveStats solve(const real_buf& h, const real_buf& v, real_buf& u);
  void reset();
  long total_iterations() const { return total_iterations_; }

private:
  const Grid* grid_;
  System sys_;
  spectral::DerivSymbol sym_;
  std::vector<double> precond_;
  real_buf warm_;
  bool have_warm_ = false;
  long total_iterations_ = 0;
};

// One RK4 stepper instance holds the symbols, the warm-started elliptic
// solver and all scratch buffers for a fixed grid and system.
class Stepper {
public:
  Stepper(const Grid& g, const System& sys);

  // Transforms the coefficients to grid values, checks the depth stays
  // positive and inverts the elliptic operator for the velocity. Throws
  // CavitationError when min h <= 0.
  void prepare(const cplx* zeta_hat, const cplx* v_hat);

  // d/dt of (zeta_hat, v_hat); calls prepare on the inputs.
  void rhs(const cplx* zeta_hat, const cplx* v_hat, cplx* dzeta_hat, cplx* dv_hat);
  void step(State& s, double dt);

  // grid values from the last prepare
  const real_buf& surface() const { return zeta_; }
  const real_buf& momentum() const { return v_; }
  const real_buf& velocity() const { return u_; }
  const real_buf& depth() const { return h_; }
  double min_depth() const { return min_depth_; }

  const System& system() const { return sys_; }
  long elliptic_iterations() const { return elliptic_.total_iterations(); }

private:
  const Grid* grid_;
  System sys_;
  spectral::DerivSymbol disp_; // dispersive derivative (model symbol)
  spectral::DerivSymbol nddx_; // negated plain derivative, for flux terms
  EllipticSolver elliptic_;
  double min_depth_ = 1.0;
  real_buf zeta_, v_, h_, u_, du_, flux_, t1_, t2_;
  cplx_buf spec_;
  cplx_buf k1z_, k1v_, k2z_, k2v_, k3z_, k3v_, k4z_, k4v_, sz_, sv_;
};

struct DiagRecord {
  double t = 0.0;
  Conserved q;
  // drifts are |I(t) - I(0)| scaled by max(|I(0)|, integral of |density|)
  double drift_mass = 0.0, drift_momentum = 0.0, drift_energy = 0.0, drift_impulse = 0.0;
  double zeta_inf = 0.0, u_inf = 0.0, min_depth = 0.0;
};

struct Snapshot {
  double t = 0.0;
  real_buf zeta, u;
  cplx_buf zeta_hat, u_hat;
};

struct EvolveOptions {
  int record_every = 1;
  std::vector<double> snapshot_times;
  // observer called at every record point; must not mutate the run
  std::function<void(const DiagRecord&, const real_buf& zeta, const real_buf& u)> hook;
  double stability_budget = 1.0; // advisory: warn when dt > budget * L/N
  bool warn_to_stderr = true;
};

struct EvolveResult {
  std::vector<DiagRecord> diagnostics;
  std::vector<Snapshot> snapshots;
  State final_state;
  bool aborted = false;
  std::string abort_reason;
  long elliptic_iterations = 0;
  bool stability_warning = false;
};

EvolveResult evolve(State initial, double t_final, int steps, const System& sys,
                    const EvolveOptions& opts = {});

} // namespace gnwave::evolution

#endif
