#ifndef GNWAVE_KRYLOV_HPP
#define GNWAVE_KRYLOV_HPP

#include <cstddef>
#include <functional>
#include <vector>

namespace gnwave::krylov {

// Matrix-free real linear operator. apply must write A*in into out and may
// not alias the two. thread_safe marks operators whose apply may be called
// concurrently (needed for parallel dense assembly).
struct LinearOperator {
  std::size_t n = 0;
  std::function<void(const double* in, double* out)> apply;
  bool thread_safe = false;
};

// Solves M z = r. Used as a left preconditioner.
struct Preconditioner {
  std::function<void(const double* r, double* z)> apply;
};

struct GmresOptions {
  double tol = 1e-14;       // relative to the (preconditioned) right-hand side
  int max_iter = 100;
  int restart = 0;          // 0 = full GMRES, no restarts
  int stagnation_window = 20;
  double stagnation_factor = 1e-3; // required residual reduction per window
};

struct SolveStats {
  int iterations = 0;
  bool converged = false;
  bool stagnated = false;
  bool breakdown = false;           // happy breakdown: solution exact in the Krylov space
  double relative_residual = 0.0;   // ||b - A x||_2 / ||b||_2, recomputed on the returned x
  std::vector<double> history;      // internal residual estimates per iteration
};

// Left-preconditioned GMRES with modified Gram-Schmidt and Givens
// rotations. x holds the initial guess on entry and the solution on exit.
// Residual estimates are monotone, so the final iterate is also the best
// one; on stagnation it is returned with converged = false.
SolveStats gmres(const LinearOperator& A, const double* b, double* x,
                 const GmresOptions& opts = {}, const Preconditioner* M = nullptr);

struct DenseMatrix {
  std::size_t n = 0;
  std::vector<double> a; // row-major

  DenseMatrix() = default;
  explicit DenseMatrix(std::size_t size) : n(size), a(size * size, 0.0) {}
  double& at(std::size_t i, std::size_t j) { return a[i * n + j]; }
  double at(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

// Materializes the operator by probing columns with unit vectors. Probes
// run in parallel when the operator is marked thread safe.
DenseMatrix assemble_dense(const LinearOperator& A);

// adds beta * w w^T / (w^T w) to a
void add_rank_one(DenseMatrix& a, const std::vector<double>& w, double beta);

// PA = LU with partial pivoting, factored in place. Throws
// SingularMatrixError on a vanishing pivot column.
struct LuFactors {
  DenseMatrix lu;
  std::vector<int> piv;
};

LuFactors lu_factor(DenseMatrix a);
void lu_solve_factored(const LuFactors& f, double* bx);
std::vector<double> lu_solve(const DenseMatrix& a, const std::vector<double>& b);

// applies a dense matrix (used by tests and the LU-vs-GMRES cross-checks)
void dense_apply(const DenseMatrix& a, const double* x, double* y);

} // namespace gnwave::krylov

#endif
