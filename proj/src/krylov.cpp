#include "gnwave/krylov.hpp"

#include "gnwave/errors.hpp"
#include "gnwave/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gnwave::krylov {

namespace {

double norm2(std::size_t n, const double* x) { return std::sqrt(kernels::dot(n, x, x)); }

void precondition(const Preconditioner* M, std::size_t n, const double* r, double* z) {
  if (M && M->apply)
    M->apply(r, z);
  else
    std::copy(r, r + n, z);
}

struct GmresCycle {
  int iterations = 0;
  bool converged = false;
  bool stagnated = false;
  bool breakdown = false;
  std::vector<double> history;
};

// One restart cycle of at most maxdim Arnoldi steps; updates x in place.
GmresCycle gmres_cycle(const LinearOperator& A, const double* b, double* x, double threshold,
                       int maxdim, const GmresOptions& opts, const Preconditioner* M) {
  const std::size_t n = A.n;
  GmresCycle out;

  std::vector<double> r(n), z(n), w(n), aw(n);
  A.apply(x, aw.data());
  for (std::size_t i = 0; i < n; ++i)
    r[i] = b[i] - aw[i];
  precondition(M, n, r.data(), z.data());
  const double beta = norm2(n, z.data());
  if (beta <= threshold || beta == 0.0) {
    out.converged = true;
    return out;
  }

  std::vector<std::vector<double>> V;
  V.reserve(maxdim + 1);
  V.emplace_back(n);
  for (std::size_t i = 0; i < n; ++i)
    V[0][i] = z[i] / beta;

  // H is stored by columns; cs/sn hold the Givens rotations, g the
  // rotated residual vector.
  std::vector<std::vector<double>> H;
  std::vector<double> cs, sn;
  std::vector<double> g(1, beta);

  int j = 0;
  for (; j < maxdim; ++j) {
    A.apply(V[j].data(), aw.data());
    precondition(M, n, aw.data(), w.data());

    std::vector<double> h(j + 2, 0.0);
    for (int i = 0; i <= j; ++i) {
      h[i] = kernels::dot(n, w.data(), V[i].data());
      kernels::axpy(n, -h[i], V[i].data(), w.data());
    }
    const double hnext = norm2(n, w.data());
    h[j + 1] = hnext;

    const bool happy = hnext <= 1e-14 * beta;
    if (!happy) {
      V.emplace_back(n);
      for (std::size_t i = 0; i < n; ++i)
        V[j + 1][i] = w[i] / hnext;
    }

    for (int i = 0; i < j; ++i) {
      const double t = cs[i] * h[i] + sn[i] * h[i + 1];
      h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
      h[i] = t;
    }
    const double denom = std::hypot(h[j], h[j + 1]);
    const double c = denom == 0.0 ? 1.0 : h[j] / denom;
    const double s = denom == 0.0 ? 0.0 : h[j + 1] / denom;
    cs.push_back(c);
    sn.push_back(s);
    h[j] = denom;
    h[j + 1] = 0.0;
    g.push_back(-s * g[j]);
    g[j] = c * g[j];
    H.push_back(std::move(h));

    const double est = std::fabs(g[j + 1]);
    out.history.push_back(est);
    out.iterations = j + 1;

    if (happy) {
      out.breakdown = true;
      out.converged = true;
      break;
    }
    if (est <= threshold) {
      out.converged = true;
      break;
    }
    const int wlen = opts.stagnation_window;
    if (wlen > 0 && (int)out.history.size() > wlen) {
      const double past = out.history[out.history.size() - 1 - wlen];
      if (est > opts.stagnation_factor * past) {
        out.stagnated = true;
        break;
      }
    }
  }

  const int m = out.iterations;
  if (m > 0) {
    // back-substitute the triangular system H y = g
    std::vector<double> y(m, 0.0);
    for (int i = m - 1; i >= 0; --i) {
      double s = g[i];
      for (int l = i + 1; l < m; ++l)
        s -= H[l][i] * y[l];
      y[i] = s / H[i][i];
    }
    for (int i = 0; i < m; ++i)
      kernels::axpy(n, y[i], V[i].data(), x);
  }
  return out;
}

} // namespace

SolveStats gmres(const LinearOperator& A, const double* b, double* x, const GmresOptions& opts,
                 const Preconditioner* M) {
  if (!A.apply || A.n == 0)
    throw std::invalid_argument("gmres: operator is empty");
  const std::size_t n = A.n;

  std::vector<double> zb(n);
  precondition(M, n, b, zb.data());
  const double normb_prec = norm2(n, zb.data());
  const double threshold = opts.tol * normb_prec;

  SolveStats stats;
  const int cap = (int)std::min<std::size_t>(opts.max_iter, n);
  int budget = cap;
  while (true) {
    const int maxdim = opts.restart > 0 ? std::min(opts.restart, budget) : budget;
    GmresCycle cy = gmres_cycle(A, b, x, threshold, maxdim, opts, M);
    stats.iterations += cy.iterations;
    stats.history.insert(stats.history.end(), cy.history.begin(), cy.history.end());
    stats.converged = cy.converged;
    stats.stagnated = cy.stagnated;
    stats.breakdown = cy.breakdown;
    budget -= cy.iterations;
    if (cy.converged || cy.stagnated || budget <= 0 || opts.restart == 0)
      break;
  }

  // recompute the true (unpreconditioned) residual on the returned iterate
  std::vector<double> ax(n);
  A.apply(x, ax.data());
  for (std::size_t i = 0; i < n; ++i)
    ax[i] = b[i] - ax[i];
  const double normb = norm2(n, b);
  const double normr = norm2(n, ax.data());
  stats.relative_residual = normb > 0.0 ? normr / normb : normr;
  return stats;
}

DenseMatrix assemble_dense(const LinearOperator& A) {
  if (!A.apply || A.n == 0)
    throw std::invalid_argument("assemble_dense: operator is empty");
  const std::size_t n = A.n;
  DenseMatrix mat(n);

#ifdef _OPENMP
  const bool par = A.thread_safe && kernels::parallel_enabled() && kernels::max_threads() > 1;
#else
  const bool par = false;
#endif

  if (par) {
#ifdef _OPENMP
#pragma omp parallel
    {
      std::vector<double> e(n, 0.0), col(n);
#pragma omp for schedule(static)
      for (long long j = 0; j < (long long)n; ++j) {
        e[j] = 1.0;
        A.apply(e.data(), col.data());
        e[j] = 0.0;
        for (std::size_t i = 0; i < n; ++i)
          mat.a[i * n + j] = col[i];
      }
    }
#endif
  } else {
    std::vector<double> e(n, 0.0), col(n);
    for (std::size_t j = 0; j < n; ++j) {
      e[j] = 1.0;
      A.apply(e.data(), col.data());
      e[j] = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        mat.a[i * n + j] = col[i];
    }
  }
  return mat;
}

void add_rank_one(DenseMatrix& a, const std::vector<double>& w, double beta) {
  if (w.size() != a.n)
    throw std::invalid_argument("add_rank_one: size mismatch");
  const double ww = kernels::dot(w.size(), w.data(), w.data());
  if (ww == 0.0)
    return;
  const double scale = beta / ww;
  const std::size_t n = a.n;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = scale * w[i];
    if (wi == 0.0)
      continue;
    double* row = a.a.data() + i * n;
    for (std::size_t j = 0; j < n; ++j)
      row[j] += wi * w[j];
  }
}

LuFactors lu_factor(DenseMatrix a) {
  const std::size_t n = a.n;
  LuFactors f;
  f.piv.resize(n);
  double* m = a.a.data();

  for (std::size_t k = 0; k < n; ++k) {
    // pivot search stays serial so tie-breaking is deterministic
    std::size_t p = k;
    double best = std::fabs(m[k * n + k]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::fabs(m[i * n + k]);
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (!(best > 0.0) || best < 1e-300)
      throw SingularMatrixError("lu_factor: zero pivot column at step " + std::to_string(k));
    f.piv[k] = (int)p;
    if (p != k)
      std::swap_ranges(m + k * n, m + (k + 1) * n, m + p * n);

    const double pivot = m[k * n + k];
    for (std::size_t i = k + 1; i < n; ++i)
      m[i * n + k] /= pivot;
    kernels::rank1_update(m, n, k, n);
  }
  f.lu = std::move(a);
  return f;
}

void lu_solve_factored(const LuFactors& f, double* bx) {
  const std::size_t n = f.lu.n;
  const double* m = f.lu.a.data();
  // the factorization swaps full rows, so all permutations are applied
  // up front, then the clean triangular solves follow
  for (std::size_t k = 0; k < n; ++k)
    std::swap(bx[k], bx[f.piv[k]]);
  for (std::size_t k = 0; k < n; ++k) {
    const double xk = bx[k];
    if (xk != 0.0)
      for (std::size_t i = k + 1; i < n; ++i)
        bx[i] -= m[i * n + k] * xk;
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = bx[i];
    const double* row = m + i * n;
    for (std::size_t j = i + 1; j < n; ++j)
      s -= row[j] * bx[j];
    bx[i] = s / row[i];
  }
}

std::vector<double> lu_solve(const DenseMatrix& a, const std::vector<double>& b) {
  if (b.size() != a.n)
    throw std::invalid_argument("lu_solve: size mismatch");
  LuFactors f = lu_factor(a);
  std::vector<double> x = b;
  lu_solve_factored(f, x.data());
  return x;
}

void dense_apply(const DenseMatrix& a, const double* x, double* y) {
  const std::size_t n = a.n;
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = a.a.data() + i * n;
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      s += row[j] * x[j];
    y[i] = s;
  }
}

} // namespace gnwave::krylov
