#ifndef GNWAVE_SOLITARY_HPP
#define GNWAVE_SOLITARY_HPP

#include "gnwave/krylov.hpp"
#include "gnwave/model.hpp"
#include "gnwave/spectral.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gnwave::solitary {

using spectral::Field;
using spectral::Grid;
using spectral::real_buf;

enum class Backend { gmres, lu };

std::string backend_name(Backend b);
Backend parse_backend(const std::string& s);

// closed-form solitary wave of the local model: zeta_c(x) =
// (c^2-1) sech^2( (sqrt(3)/2) sqrt((c^2-1)/c^2) x ), u_c = c zeta_c/(1+zeta_c)
struct ExplicitWave {
  Field zeta, u, eta; // eta = u/c = zeta/(1+zeta)
};
ExplicitWave sgn_solitary(const Grid& g, double c);

// zeta, u, h recovered from the single unknown eta = u/c of the profile
// equation; requires max eta < 1 - guard
struct ProfileFields {
  Field zeta, u, h;
};
ProfileFields eta_to_fields(const Field& eta, double c, double guard = 1e-6);

// residual of the traveling-profile equation in eta:
//   -(1/3)(1-eta)^2 D[(1-eta)^{-3} D eta] + (D eta)^2/(2(1-eta)^2)
//     + eta - eta/(c^2 (1-eta)) - eta^2/2,     D = dispersive derivative
Field traveling_residual(const Field& eta, double c, Model model, double guard = 1e-6);

// independent cross-check: residual of the surface-variable form,
//   -(1/(3h^2)) D[h^3 D(zeta/h)] + (h^2/2)(D(zeta/h))^2 + zeta/h
//     - zeta/c^2 - zeta^2/(2h^2),  h = 1 + zeta
Field surface_residual_check(const Field& zeta, double c, Model model);

// Linearization of traveling_residual about eta. Coefficient fields are
// precomputed once; apply() is reentrant (fresh scratch per call), so the
// operator can be probed from several threads during dense assembly.
class TravelingJacobian {
public:
  TravelingJacobian(const Field& eta, double c, Model model);
  void apply(const double* w, double* out) const;
  int size() const { return grid_->n; }
  const real_buf& pointwise_diagonal() const { return diag0_; }
  krylov::LinearOperator as_operator() const;

private:
  const Grid* grid_;
  spectral::DerivSymbol sym_;
  real_buf diag0_, diag1_, m1_, m2_, a2_;
};

struct NewtonOptions {
  double tol = 1e-12;
  int max_iter = 30;
  Backend backend = Backend::gmres;
  double krasny_eps = 1e-14;
  bool symmetrize = true;
  // rank-one shift removing the translation kernel; default: on for lu
  std::optional<bool> kernel_shift;
  // preconditioner Diag(1 + amplification * k^2 / 3)
  double precond_amplification = 1.0;
  double guard = 1e-6;
  // a residual floor reached by a stalled iteration is accepted up to here
  double stagnation_accept = 1e-4;
  krylov::GmresOptions gmres;
};

struct SolitaryWave {
  double c = 0.0;
  Model model = Model::wgn;
  Backend backend = Backend::gmres;
  const Grid* grid = nullptr;
  Field eta, zeta, u, h;
  double residual_norm = 0.0;
  int newton_iterations = 0;
  bool at_floor = false; // stopped at a stagnation floor above tol
  std::vector<double> residual_history;
  std::vector<int> gmres_iterations; // per Newton step (empty for lu)
};

// Newton iteration for the traveling profile, seeded with the explicit
// local-model wave unless an initial iterate is supplied.
SolitaryWave newton_solve(const Grid& g, double c, Model model, const NewtonOptions& opts = {},
                          const Field* initial = nullptr);

// Family construction along increasing speeds; each target is seeded by
// polynomial extrapolation (degree <= 3) of the previously converged
// profiles, with the explicit wave as fallback seed.
struct ContinuationResult {
  std::vector<SolitaryWave> waves;
  bool completed = true;
  double failed_c = 0.0;
  std::string failure;
};
ContinuationResult continuation(const Grid& g, const std::vector<double>& targets, Model model,
                                const NewtonOptions& opts = {});

} // namespace gnwave::solitary

#endif
