#include "gnwave/errors.hpp"
#include "gnwave/experiments.hpp"
#include "gnwave/io.hpp"
#include "gnwave/selfcheck.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <memory>
#include <mutex>
#include <thread>

namespace fs = std::filesystem;
using namespace gnwave;

namespace {

std::string timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

struct SolitaryArgs {
  double c = 2.0;
  std::vector<double> c_list;
  int n = 1 << 10;
  double length = 20.0;
  std::string model = "wgn";
  std::string backend = "gmres";
  double precond = 1.0;
  double krasny = 1e-14;
  double tol = 1e-12;
  std::string out = "out";
};

int run_solitary(const SolitaryArgs& a) {
  Timer timer;
  const auto started = timestamp_utc();
  auto grid = std::make_shared<const spectral::Grid>(spectral::make_grid(a.n, a.length));
  solitary::NewtonOptions opts;
  opts.tol = a.tol;
  opts.backend = solitary::parse_backend(a.backend);
  opts.krasny_eps = a.krasny;
  opts.precond_amplification = a.precond;
  const Model model = parse_model(a.model);

  io::Manifest m;
  m.add("command", std::string("solitary"));
  m.add("model", a.model);
  m.add("backend", a.backend);
  m.add("N", a.n);
  m.add("L", a.length);
  m.add("newton_tol", a.tol);
  m.add("krasny", a.krasny);
  m.add("precond_amplification", a.precond);
  m.add("build", io::build_id());
  m.add("started", started);

  int code = 0;
  if (!a.c_list.empty()) {
    auto result = solitary::continuation(*grid, a.c_list, model, opts);
    for (const auto& w : result.waves) {
      io::write_wave(a.out, w);
      m.add("iterations_c" + io::format_double(w.c), w.newton_iterations);
      m.add("residual_c" + io::format_double(w.c), w.residual_norm);
    }
    m.add("completed", result.completed);
    if (!result.completed) {
      m.add("failed_c", result.failed_c);
      std::fprintf(stderr, "no convergence at c = %s\n",
                   io::format_double(result.failed_c).c_str());
      code = 1;
    }
  } else {
    try {
      auto w = solitary::newton_solve(*grid, a.c, model, opts);
      io::write_wave(a.out, w);
      m.add("c", a.c);
      m.add("iterations", w.newton_iterations);
      m.add("residual_norm", w.residual_norm);
      m.add("at_floor", w.at_floor);
      std::string hist;
      for (double r : w.residual_history)
        hist += (hist.empty() ? "" : " ") + io::format_double(r);
      m.add("residual_history", hist);
    } catch (const NumericalError& e) {
      m.add("error", std::string(e.what()));
      std::fprintf(stderr, "%s\n", e.what());
      code = 1;
    }
  }
  m.add("duration_seconds", timer.seconds());
  io::write_manifest(a.out, m);
  return code;
}

struct EvolveArgs {
  std::string state_file;
  std::string model = "sgn";
  double delta = 1.0;
  int n = 1 << 8;
  double length = 10.0;
  double t_final = 0.0;
  int nt = 0;
  bool dealias = false;
  double precond = 1.0;
  int record_every = 1;
  std::vector<double> snapshots;
  std::string out = "out";
};

int run_evolve(const EvolveArgs& a) {
  Timer timer;
  const auto started = timestamp_utc();

  std::shared_ptr<const spectral::Grid> grid;
  spectral::real_buf zeta, u;
  if (!a.state_file.empty()) {
    auto data = io::read_state_csv(a.state_file);
    const int n = static_cast<int>(data.x.size());
    if (n < 8 || n % 2)
      throw std::invalid_argument("state file needs an even number of rows (at least 8)");
    const double length = data.x.back() / std::acos(-1.0);
    grid = std::make_shared<const spectral::Grid>(spectral::make_grid(n, length));
    for (int i = 0; i < n; ++i)
      if (std::fabs(grid->x[i] - data.x[i]) > 1e-9 * (1.0 + std::fabs(data.x[i])))
        throw std::invalid_argument("state file nodes are not a uniform periodic grid");
    zeta = std::move(data.zeta);
    u = std::move(data.u);
  } else {
    grid = std::make_shared<const spectral::Grid>(spectral::make_grid(a.n, a.length));
    zeta.assign(grid->n, 0.0);
    u.assign(grid->n, 0.0);
  }

  evolution::System sys;
  sys.model = parse_model(a.model);
  sys.delta = a.delta;
  sys.dealias = a.dealias;
  sys.precond_amplification = a.precond;

  io::Manifest m;
  m.add("command", std::string("evolve"));
  m.add("model", a.model);
  m.add("delta", a.delta);
  m.add("N", grid->n);
  m.add("L", grid->length);
  m.add("T", a.t_final);
  m.add("nt", a.nt);
  m.add("dealias", a.dealias);
  m.add("precond_amplification", a.precond);
  m.add("state_file", a.state_file.empty() ? std::string("(rest)") : a.state_file);
  m.add("elliptic_tol", sys.gmres_tol);
  m.add("build", io::build_id());
  m.add("started", started);

  auto v = evolution::velocity_to_momentum(*grid, sys, zeta, u);
  auto state = evolution::make_state(*grid, spectral::make_field(*grid, zeta),
                                     spectral::make_field(*grid, v));
  evolution::EvolveOptions opts;
  opts.record_every = a.record_every;
  opts.snapshot_times = a.snapshots;

  auto res = evolution::evolve(std::move(state), a.t_final, a.nt, sys, opts);
  io::write_diagnostics(a.out, res.diagnostics);
  for (const auto& snap : res.snapshots)
    io::write_snapshot(a.out, *grid, snap);
  m.add("aborted", res.aborted);
  if (res.aborted)
    m.add("abort_reason", res.abort_reason);
  m.add("elliptic_iterations", res.elliptic_iterations);
  m.add("stability_warning", res.stability_warning);
  m.add("duration_seconds", timer.seconds());
  io::write_manifest(a.out, m);
  if (res.aborted) {
    std::fprintf(stderr, "run aborted: %s\n", res.abort_reason.c_str());
    return 1;
  }
  return 0;
}

struct ExperimentArgs {
  std::string name;
  std::string model;
  double c = 2.0;
  std::string perturbation = "none";
  double lambda = 1.0;
  double bump = 0.0;
  double shift = 0.0;
  double delta = 0.1;
  std::vector<double> delta_list;
  double delta2 = 0.1;
  double x0 = -3.0;
  int n = 0;
  double length = 0.0;
  int nt = -1;
  double t_final = -1.0;
  int dealias = -1; // -1 keep default, 0 off, 1 on
  double precond = 0.0;
  int record_every = 1;
  std::vector<double> snapshots;
  int jobs = 1;
  std::string out = "out";
};

experiments::Scenario build_scenario(const ExperimentArgs& a, double delta) {
  using namespace experiments;
  const auto kind = parse_scenario(a.name);
  const Model model = a.model.empty() ? Model::sgn : parse_model(a.model);
  Scenario s;
  switch (kind) {
  case ScenarioKind::solitary_validation:
    s = scenario_solitary_validation(a.model.empty() ? Model::sgn : model, a.c);
    break;
  case ScenarioKind::perturbed_solitary:
    s = scenario_perturbed_solitary(a.model.empty() ? Model::sgn : model, a.c,
                                    parse_perturbation(a.perturbation),
                                    a.perturbation.rfind("scale", 0) == 0 ? a.lambda : a.bump);
    s.shift = a.shift;
    break;
  case ScenarioKind::simple_wave:
    s = scenario_simple_wave(a.model.empty() ? Model::sgn : model, delta);
    s.x0 = a.x0;
    break;
  case ScenarioKind::camassa_holm: s = scenario_camassa_holm(a.delta2); break;
  case ScenarioKind::cavitation: s = scenario_cavitation(); break;
  }
  if (a.n > 0)
    s.n = a.n;
  if (a.length > 0.0)
    s.length = a.length;
  if (a.nt >= 0)
    s.nt = a.nt;
  if (a.t_final >= 0.0)
    s.t_final = a.t_final;
  if (a.dealias >= 0)
    s.dealias = a.dealias != 0;
  if (a.precond > 0.0)
    s.precond_amplification = a.precond;
  s.record_every = a.record_every;
  s.snapshot_times = a.snapshots;
  return s;
}

int write_scenario_report(const experiments::ScenarioReport& rep, const fs::path& out,
                          const std::string& started, double seconds) {
  const auto& s = rep.scenario;
  io::Manifest m;
  m.add("command", std::string("experiment"));
  m.add("scenario", experiments::scenario_name(s.kind));
  m.add("model", model_name(s.model));
  m.add("delta", s.delta);
  m.add("N", s.n);
  m.add("L", s.length);
  m.add("nt", s.nt);
  m.add("T", s.t_final);
  m.add("dealias", s.dealias);
  m.add("precond_amplification", s.precond_amplification);
  m.add("record_every", s.record_every);
  if (s.kind == experiments::ScenarioKind::perturbed_solitary) {
    m.add("c", s.c);
    m.add("perturbation", experiments::perturbation_name(s.perturbation));
    m.add("lambda", s.lambda);
    m.add("bump", s.bump);
    m.add("shift", s.shift);
    m.add("settled", rep.settled);
  }
  if (s.kind == experiments::ScenarioKind::simple_wave) {
    m.add("x0", s.x0);
    m.add("shock_time", rep.time_of_shock);
  }

  io::write_diagnostics(out, rep.run.diagnostics);
  for (const auto& snap : rep.run.snapshots)
    io::write_snapshot(out, *rep.grid, snap);

  if (!rep.gradient_series.empty()) {
    io::Table t;
    t.columns = {"t", "dzeta_inf"};
    for (const auto& [tt, v] : rep.gradient_series)
      t.rows.push_back({tt, v});
    io::write_table(out / "gradient.csv", t);
  }
  for (const auto& rs : rep.riemann) {
    io::Table t;
    if (rs.has_oracle) {
      t.columns = {"x", "r", "r_oracle"};
      for (int i = 0; i < rep.grid->n; ++i)
        t.rows.push_back({rep.grid->x[i], rs.r[i], rs.r_oracle[i]});
      m.add("riemann_error_t" + io::format_double(rs.t), rs.sup_error);
    } else {
      t.columns = {"x", "r"};
      for (int i = 0; i < rep.grid->n; ++i)
        t.rows.push_back({rep.grid->x[i], rs.r[i]});
    }
    io::write_table(out / ("riemann_t" + io::format_double(rs.t) + ".csv"), t);
  }
  if (!rep.windows.empty()) {
    io::Table t;
    t.columns = {"t0", "t1", "min_zeta_inf", "max_zeta_inf", "amplitude"};
    for (const auto& w : rep.windows)
      t.rows.push_back({w.t0, w.t1, w.min_zeta_inf, w.max_zeta_inf, w.amplitude()});
    io::write_table(out / "windows.csv", t);
  }

  m.add("aborted", rep.run.aborted);
  if (rep.run.aborted)
    m.add("abort_reason", rep.run.abort_reason);
  m.add("elliptic_iterations", rep.run.elliptic_iterations);
  m.add("stability_warning", rep.run.stability_warning);
  m.add("build", io::build_id());
  m.add("started", started);
  m.add("duration_seconds", seconds);
  io::write_manifest(out, m);
  if (rep.run.aborted) {
    std::fprintf(stderr, "run aborted: %s\n", rep.run.abort_reason.c_str());
    return 1;
  }
  return 0;
}

int run_experiment(const ExperimentArgs& a) {
  if (!a.delta_list.empty() && a.name != "simple_wave")
    throw std::invalid_argument("--delta-list applies to the simple_wave scenario only");

  std::vector<double> deltas = a.delta_list;
  if (deltas.empty())
    deltas.push_back(a.delta);

  struct Job {
    experiments::Scenario scenario;
    fs::path out;
    int code = 0;
    std::string error;
  };
  std::vector<Job> runs;
  for (double d : deltas) {
    Job j;
    j.scenario = build_scenario(a, d);
    j.out = deltas.size() == 1 ? fs::path(a.out)
                               : fs::path(a.out) / ("delta_" + io::format_double(d));
    runs.push_back(std::move(j));
  }

  const auto started = timestamp_utc();
  std::mutex next_mutex;
  std::size_t next = 0;
  auto worker = [&] {
    for (;;) {
      std::size_t idx;
      {
        std::lock_guard<std::mutex> lock(next_mutex);
        if (next >= runs.size())
          return;
        idx = next++;
      }
      auto& job = runs[idx];
      Timer timer;
      try {
        auto rep = experiments::run_scenario(job.scenario);
        job.code = write_scenario_report(rep, job.out, started, timer.seconds());
      } catch (const NumericalError& e) {
        job.code = 1;
        job.error = e.what();
      }
    }
  };

  const int threads = std::max(1, std::min<int>(a.jobs, static_cast<int>(runs.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i)
      pool.emplace_back(worker);
    for (auto& th : pool)
      th.join();
  }

  int code = 0;
  for (const auto& job : runs) {
    if (!job.error.empty())
      std::fprintf(stderr, "%s: %s\n", job.out.string().c_str(), job.error.c_str());
    code = std::max(code, job.code);
  }
  return code;
}

int run_check(int n) {
  const auto results = selfcheck::run(n);
  for (const auto& r : results)
    std::printf("%-34s %s  (%.3e vs bound %.3e)\n", r.name.c_str(), r.pass ? "pass" : "FAIL",
                r.measured, r.bound);
  return selfcheck::all_passed(results) ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"pseudospectral solver for Green-Naghdi type water wave systems"};
  app.set_config("--config", "", "read options from a key = value file with [section] headers");
  app.require_subcommand(1);

  SolitaryArgs sa;
  auto* sol = app.add_subcommand("solitary", "construct solitary waves by Newton iteration");
  sol->add_option("--c", sa.c, "wave velocity (> 1)");
  sol->add_option("--c-list", sa.c_list, "ascending velocities solved by continuation")
      ->delimiter(',');
  sol->add_option("--N", sa.n, "grid size (power of two recommended)");
  sol->add_option("--L", sa.length, "domain half-length in units of pi");
  sol->add_option("--model", sa.model, "sgn or wgn");
  sol->add_option("--backend", sa.backend, "gmres or lu");
  sol->add_option("--precond", sa.precond, "preconditioner amplification factor");
  sol->add_option("--krasny", sa.krasny, "spectral noise filter threshold");
  sol->add_option("--tol", sa.tol, "Newton residual target");
  sol->add_option("--out", sa.out, "output directory");

  EvolveArgs ea;
  auto* evo = app.add_subcommand("evolve", "integrate an initial state in time");
  evo->add_option("--state", ea.state_file, "csv with x,zeta,u rows (defaults to rest)");
  evo->add_option("--model", ea.model, "sgn or wgn");
  evo->add_option("--delta", ea.delta, "long-wave scale parameter");
  evo->add_option("--N", ea.n, "grid size when starting from rest");
  evo->add_option("--L", ea.length, "domain half-length in units of pi");
  evo->add_option("--T", ea.t_final, "final time");
  evo->add_option("--nt", ea.nt, "number of time steps");
  evo->add_flag("--dealias", ea.dealias, "apply the 2/3 rule");
  evo->add_option("--precond", ea.precond, "elliptic preconditioner amplification");
  evo->add_option("--record-every", ea.record_every, "diagnostic cadence in steps");
  evo->add_option("--snapshots", ea.snapshots, "times at which to store fields")->delimiter(',');
  evo->add_option("--out", ea.out, "output directory");

  ExperimentArgs xa;
  auto* exp = app.add_subcommand("experiment", "run a named scenario");
  exp->add_option("name", xa.name,
                  "solitary_validation | perturbed_solitary | simple_wave | camassa_holm | "
                  "cavitation")
      ->required();
  exp->add_option("--model", xa.model, "sgn or wgn");
  exp->add_option("--c", xa.c, "wave velocity");
  exp->add_option("--perturbation", xa.perturbation, "none|scale_u|scale_zeta|gauss_u|gauss_zeta");
  exp->add_option("--lambda", xa.lambda, "scaling factor for scale_* perturbations");
  exp->add_option("--bump", xa.bump, "amplitude for gauss_* perturbations");
  exp->add_option("--shift", xa.shift, "evaluate base data at x + shift");
  exp->add_option("--delta", xa.delta, "long-wave scale for simple_wave");
  exp->add_option("--delta-list", xa.delta_list, "run several simple_wave scales")->delimiter(',');
  exp->add_option("--delta2", xa.delta2, "squared scale for camassa_holm");
  exp->add_option("--x0", xa.x0, "Gaussian center for simple_wave");
  exp->add_option("--N", xa.n, "grid size override");
  exp->add_option("--L", xa.length, "domain half-length override");
  exp->add_option("--nt", xa.nt, "step count override");
  exp->add_option("--T", xa.t_final, "final time override");
  exp->add_option("--dealias", xa.dealias, "0 or 1, overrides the scenario default");
  exp->add_option("--precond", xa.precond, "elliptic preconditioner amplification override");
  exp->add_option("--record-every", xa.record_every, "diagnostic cadence in steps");
  exp->add_option("--snapshots", xa.snapshots, "snapshot times")->delimiter(',');
  exp->add_option("--jobs", xa.jobs, "parallel scenario runs for sweeps");
  exp->add_option("--out", xa.out, "output directory");

  int check_n = 256;
  auto* chk = app.add_subcommand("check", "run the invariant battery");
  chk->add_option("--N", check_n, "grid size for the checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sol->parsed())
      return run_solitary(sa);
    if (evo->parsed())
      return run_evolve(ea);
    if (exp->parsed())
      return run_experiment(xa);
    if (chk->parsed())
      return run_check(check_n);
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 1;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  }
  return 0;
}
