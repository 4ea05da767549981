#ifndef GNWAVE_ERRORS_HPP
#define GNWAVE_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace gnwave {

// Base class for failures of the numerics (as opposed to bad arguments,
// which throw std::invalid_argument). The CLI maps these to exit code 1.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Total depth reached (or came too close to) zero, or a surface iterate
// left the physical range.
struct CavitationError : NumericalError {
  CavitationError(const std::string& what, double worst) : NumericalError(what), worst_value(worst) {}
  double worst_value;
};

// An iteration failed to reach its tolerance; carries the residual history.
struct ConvergenceError : NumericalError {
  ConvergenceError(const std::string& what, std::vector<double> hist)
      : NumericalError(what), residual_history(std::move(hist)) {}
  std::vector<double> residual_history;
};

struct SingularMatrixError : NumericalError {
  explicit SingularMatrixError(const std::string& what) : NumericalError(what) {}
};

} // namespace gnwave

#endif
