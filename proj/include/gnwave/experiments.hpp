#ifndef GNWAVE_EXPERIMENTS_HPP
#define GNWAVE_EXPERIMENTS_HPP

#include "gnwave/evolution.hpp"
#include "gnwave/solitary.hpp"

#include <memory>
#include <string>
#include <vector>

namespace gnwave::experiments {

using evolution::State;
using evolution::System;
using spectral::Field;
using spectral::Grid;
using spectral::real_buf;

enum class ScenarioKind {
  solitary_validation,
  perturbed_solitary,
  simple_wave,
  camassa_holm,
  cavitation,
};

std::string scenario_name(ScenarioKind k);
ScenarioKind parse_scenario(const std::string& name);

enum class Perturbation { none, scale_u, scale_zeta, gauss_u, gauss_zeta };

std::string perturbation_name(Perturbation p);
Perturbation parse_perturbation(const std::string& name);

struct Scenario {
  ScenarioKind kind = ScenarioKind::solitary_validation;
  Model model = Model::sgn;
  double delta = 1.0;
  int n = 1 << 9;
  double length = 10.0;
  int nt = 2000;
  double t_final = 1.0;
  bool dealias = false;
  double precond_amplification = 1.0;
  int record_every = 1;
  std::vector<double> snapshot_times;

  // perturbed_solitary
  double c = 2.0;
  Perturbation perturbation = Perturbation::none;
  double lambda = 1.0; // field scaling
  double bump = 0.0;   // Gaussian bump amplitude
  double shift = 0.0;  // evaluate base data at x + shift

  // simple_wave
  double x0 = -3.0;
};

// builders carrying the reference run configurations
Scenario scenario_solitary_validation(Model model, double c = 2.0);
Scenario scenario_perturbed_solitary(Model model, double c, Perturbation p, double amount);
Scenario scenario_simple_wave(Model model, double delta);
Scenario scenario_camassa_holm(double delta2 = 0.1);
Scenario scenario_cavitation();

System make_system(const Scenario& s);

// initial data; each builds v through the forward elliptic map
struct InitialData {
  real_buf zeta, u, v;
};

InitialData ic_perturbed_solitary(const Grid& g, const Scenario& s);
InitialData ic_simple_wave(const Grid& g, double x0, const System& sys);
InitialData ic_camassa_holm(const Grid& g, double delta, const System& sys);
InitialData ic_cavitation(const Grid& g, const System& sys);

// right-moving Riemann invariant r = u + 2 sqrt(1+zeta) - 2
real_buf riemann_field(const real_buf& zeta, const real_buf& u);

// characteristics of  dr/dt + (1 + 3r/4) dr/dx = 0
// shock time = -1/min(3/4 r0'); +inf when r0' >= 0 everywhere
double shock_time(const Field& r0);
// r(x, t) on the grid by inverting x0 + (1 + 3/4 r0(x0)) t = x; valid
// strictly before the shock time
real_buf characteristic_solution(const Field& r0, double t);

struct RiemannSnapshot {
  double t = 0.0;
  real_buf r;
  bool has_oracle = false;
  real_buf r_oracle;
  double sup_error = 0.0;
};

struct WindowStat {
  double t0 = 0.0, t1 = 0.0;
  double min_zeta_inf = 0.0, max_zeta_inf = 0.0;
  double amplitude() const { return max_zeta_inf - min_zeta_inf; }
};

struct ScenarioReport {
  Scenario scenario;
  std::shared_ptr<const Grid> grid;
  evolution::EvolveResult run;
  // (t, max |d(zeta)/dx|) at every record
  std::vector<std::pair<double, double>> gradient_series;
  // simple_wave: the r field at each snapshot with the pre-shock oracle
  std::vector<RiemannSnapshot> riemann;
  double time_of_shock = 0.0;
  // perturbed_solitary: oscillation windows of width one over ||zeta||_inf
  std::vector<WindowStat> windows;
  bool settled = false;
};

ScenarioReport run_scenario(const Scenario& s);

} // namespace gnwave::experiments

#endif
