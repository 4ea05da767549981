#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gnwave/errors.hpp"
#include "gnwave/krylov.hpp"

#include <atomic>
#include <cmath>
#include <random>
#include <vector>

using namespace gnwave;
using krylov::DenseMatrix;
using krylov::LinearOperator;

namespace {

// diagonally dominant random matrix: well conditioned at any size
DenseMatrix random_dominant(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  DenseMatrix a(n);
  for (std::size_t i = 0; i < n; ++i) {
    double off = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) {
        a.at(i, j) = unif(rng);
        off += std::fabs(a.at(i, j));
      }
    a.at(i, i) = off + 1.0 + unif(rng) * 0.25;
  }
  return a;
}

std::vector<double> random_vec(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& e : v)
    e = unif(rng);
  return v;
}

LinearOperator as_operator(const DenseMatrix& a, bool thread_safe = false) {
  LinearOperator op;
  op.n = a.n;
  op.thread_safe = thread_safe;
  op.apply = [&a](const double* x, double* y) { krylov::dense_apply(a, x, y); };
  return op;
}

double rel_residual(const DenseMatrix& a, const std::vector<double>& x,
                    const std::vector<double>& b) {
  std::vector<double> r(a.n);
  krylov::dense_apply(a, x.data(), r.data());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.n; ++i) {
    num += (b[i] - r[i]) * (b[i] - r[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

} // namespace

TEST_CASE("lu_factor reproduces known inverses and permutations") {
  // matrix that forces row swaps: zero leading pivot
  DenseMatrix a(3);
  a.at(0, 0) = 0.0;
  a.at(0, 1) = 2.0;
  a.at(0, 2) = 1.0;
  a.at(1, 0) = 1.0;
  a.at(1, 1) = 1.0;
  a.at(1, 2) = 1.0;
  a.at(2, 0) = 4.0;
  a.at(2, 1) = 2.0;
  a.at(2, 2) = 5.0;
  const std::vector<double> x_true = {1.0, -2.0, 3.0};
  std::vector<double> b(3);
  krylov::dense_apply(a, x_true.data(), b.data());
  const auto x = krylov::lu_solve(a, b);
  for (int i = 0; i < 3; ++i)
    CHECK(x[i] == doctest::Approx(x_true[i]).epsilon(1e-13));

  // random system solved to machine accuracy
  const auto m = random_dominant(64, 1);
  const auto xt = random_vec(64, 2);
  std::vector<double> rb(64);
  krylov::dense_apply(m, xt.data(), rb.data());
  const auto xs = krylov::lu_solve(m, rb);
  for (std::size_t i = 0; i < 64; ++i)
    CHECK(xs[i] == doctest::Approx(xt[i]).epsilon(1e-11));

  // factored form can be reused for several right-hand sides
  auto f = krylov::lu_factor(m);
  auto rhs2 = random_vec(64, 3);
  auto sol2 = rhs2;
  krylov::lu_solve_factored(f, sol2.data());
  std::vector<double> check(64);
  krylov::dense_apply(m, sol2.data(), check.data());
  for (std::size_t i = 0; i < 64; ++i)
    CHECK(check[i] == doctest::Approx(rhs2[i]).epsilon(1e-11));
}

TEST_CASE("lu_factor rejects singular input") {
  DenseMatrix a(4);
  // rank deficient: two equal rows
  for (std::size_t j = 0; j < 4; ++j) {
    a.at(0, j) = double(j) + 1.0;
    a.at(1, j) = double(j) + 1.0;
    a.at(2, j) = j == 2 ? 1.0 : 0.0;
    a.at(3, j) = j == 3 ? 1.0 : 0.0;
  }
  CHECK_THROWS_AS((void)krylov::lu_factor(a), SingularMatrixError);
}

TEST_CASE("gmres solves a diagonal system in one iteration when preconditioned exactly") {
  const std::size_t n = 50;
  DenseMatrix a(n);
  for (std::size_t i = 0; i < n; ++i)
    a.at(i, i) = 1.0 + double(i) * 0.37;
  const auto b = random_vec(n, 4);
  std::vector<double> x(n, 0.0);

  krylov::Preconditioner prec;
  prec.apply = [&a, n](const double* r, double* z) {
    for (std::size_t i = 0; i < n; ++i)
      z[i] = r[i] / a.at(i, i);
  };
  const auto op = as_operator(a);
  const auto st = krylov::gmres(op, b.data(), x.data(), {}, &prec);
  CHECK(st.converged);
  CHECK(st.iterations == 1);
  CHECK(rel_residual(a, x, b) < 1e-14);
}

TEST_CASE("gmres matches the LU solution on a random well-conditioned system") {
  const std::size_t n = 120;
  const auto a = random_dominant(n, 5);
  const auto b = random_vec(n, 6);

  const auto x_lu = krylov::lu_solve(a, b);
  std::vector<double> x(n, 0.0);
  krylov::GmresOptions opts;
  opts.tol = 1e-14;
  opts.max_iter = 300;
  const auto st = krylov::gmres(as_operator(a), b.data(), x.data(), opts);
  CHECK(st.converged);
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    diff = std::max(diff, std::fabs(x[i] - x_lu[i]));
    scale = std::max(scale, std::fabs(x_lu[i]));
  }
  CHECK(diff / scale < 1e-9);
}

TEST_CASE("gmres residual estimates decrease monotonically") {
  const std::size_t n = 80;
  const auto a = random_dominant(n, 7);
  const auto b = random_vec(n, 8);
  std::vector<double> x(n, 0.0);
  krylov::GmresOptions opts;
  opts.tol = 1e-13;
  const auto st = krylov::gmres(as_operator(a), b.data(), x.data(), opts);
  CHECK(st.converged);
  REQUIRE(st.history.size() >= 2);
  for (std::size_t i = 1; i < st.history.size(); ++i)
    CHECK(st.history[i] <= st.history[i - 1] * (1.0 + 1e-12));
  // the recomputed true residual agrees with the final internal estimate
  CHECK(st.relative_residual < 10.0 * opts.tol);
}

TEST_CASE("gmres finds the exact answer by happy breakdown") {
  // b is an eigenvector: the Krylov space closes after one step
  const std::size_t n = 30;
  DenseMatrix a(n);
  for (std::size_t i = 0; i < n; ++i)
    a.at(i, i) = 2.0;
  a.at(3, 7) = 0.5; // not a multiple of the identity
  std::vector<double> b(n, 0.0);
  b[0] = 1.0;
  std::vector<double> x(n, 0.0);
  const auto st = krylov::gmres(as_operator(a), b.data(), x.data());
  CHECK(st.converged);
  CHECK(st.iterations == 1);
  CHECK(x[0] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("gmres reports stagnation instead of spinning") {
  // rotation-like system with an awful spectrum for unrestarted GMRES on a
  // tight budget: max_iter smaller than the degree needed
  const std::size_t n = 60;
  DenseMatrix a(n);
  for (std::size_t i = 0; i + 1 < n; ++i)
    a.at(i, i + 1) = 1.0;
  a.at(n - 1, 0) = 1.0; // cyclic shift: residual cannot drop until step n
  std::vector<double> b(n, 0.0);
  b[0] = 1.0;
  std::vector<double> x(n, 0.0);
  krylov::GmresOptions opts;
  opts.tol = 1e-14;
  opts.max_iter = 40; // < n, so the shift system cannot converge
  const auto st = krylov::gmres(as_operator(a), b.data(), x.data(), opts);
  CHECK_FALSE(st.converged);
  CHECK(st.stagnated);
  CHECK(st.iterations <= 40);
}

TEST_CASE("restarted gmres still converges on a dominant system") {
  const std::size_t n = 90;
  const auto a = random_dominant(n, 9);
  const auto b = random_vec(n, 10);
  std::vector<double> x(n, 0.0);
  krylov::GmresOptions opts;
  opts.tol = 1e-12;
  opts.restart = 12;
  opts.max_iter = 400;
  const auto st = krylov::gmres(as_operator(a), b.data(), x.data(), opts);
  CHECK(st.converged);
  CHECK(rel_residual(a, x, b) < 1e-11);
}

TEST_CASE("gmres starts from the supplied initial guess") {
  const std::size_t n = 40;
  const auto a = random_dominant(n, 11);
  const auto xt = random_vec(n, 12);
  std::vector<double> b(n);
  krylov::dense_apply(a, xt.data(), b.data());
  auto x = xt; // exact solution supplied as the guess
  const auto st = krylov::gmres(as_operator(a), b.data(), x.data());
  CHECK(st.converged);
  CHECK(st.iterations <= 1);
  for (std::size_t i = 0; i < n; ++i)
    CHECK(x[i] == doctest::Approx(xt[i]).epsilon(1e-12));
}

TEST_CASE("assemble_dense materializes the operator, serial and parallel alike") {
  const std::size_t n = 48;
  const auto a = random_dominant(n, 13);

  std::atomic<int> calls{0};
  LinearOperator op;
  op.n = n;
  op.thread_safe = true;
  op.apply = [&a, &calls](const double* x, double* y) {
    ++calls;
    krylov::dense_apply(a, x, y);
  };
  const auto m = krylov::assemble_dense(op);
  CHECK(calls.load() == int(n));
  REQUIRE(m.n == n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      CHECK(m.at(i, j) == a.at(i, j));

  // a serial operator gives the identical matrix
  const auto ms = krylov::assemble_dense(as_operator(a, false));
  for (std::size_t i = 0; i < n * n; ++i)
    CHECK(ms.a[i] == m.a[i]);
}

TEST_CASE("add_rank_one shifts exactly one direction") {
  const std::size_t n = 25;
  DenseMatrix a(n); // zero matrix
  auto w = random_vec(n, 14);
  krylov::add_rank_one(a, w, 3.0);

  double ww = 0.0;
  for (double e : w)
    ww += e * e;
  // action on w is 3w, action on any orthogonal direction is zero
  std::vector<double> y(n);
  krylov::dense_apply(a, w.data(), y.data());
  for (std::size_t i = 0; i < n; ++i)
    CHECK(y[i] == doctest::Approx(3.0 * w[i]).epsilon(1e-12));

  std::vector<double> orth(n, 0.0);
  orth[0] = w[1];
  orth[1] = -w[0];
  krylov::dense_apply(a, orth.data(), y.data());
  for (std::size_t i = 0; i < n; ++i)
    CHECK(std::fabs(y[i]) < 1e-12 * std::fabs(3.0 / ww));
}
