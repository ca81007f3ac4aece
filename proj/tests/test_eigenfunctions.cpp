// Copyright 2026 The slowdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "slowdiff/eigenfunctions.hpp"

using namespace slowdiff;

TEST_CASE("first-integral shape integral agrees with the Beta function")
{
  for (double p : {2.5, 3.0, 4.0, 6.0})
  {
    const FirstIntegral1D o = first_integral_oracle(p, 1.0);
    // int_0^1 (1 - s^2)^{-1/p} ds = B(1/2, 1 - 1/p) / 2
    CHECK(o.shape_integral == doctest::Approx(0.5 * std::beta(0.5, 1.0 - 1.0 / p)).epsilon(1e-12));
  }
}

TEST_CASE("first-integral maximum scales with the interval length")
{
  for (double p : {3.0, 4.0, 6.0})
  {
    const FirstIntegral1D a = first_integral_oracle(p, 1.0);
    for (double L : {0.5, 2.0, 4.0})
    {
      const FirstIntegral1D b = first_integral_oracle(p, L);
      CHECK(b.M == doctest::Approx(a.M * std::pow(L, p / (p - 2))).epsilon(1e-12));
      CHECK(b.C1 == doctest::Approx(a.C1).epsilon(1e-12));
      CHECK(b.slope0 == doctest::Approx(a.C2 * std::pow(L, 2 / (p - 2))).epsilon(1e-12));
    }
    // Energy balance at the boundary: ((p-1)/p)|U'(0)|^p = M^2 / (2(p-2)).
    CHECK((p - 1) / p * std::pow(a.slope0, p) == doctest::Approx(a.integration_constant).epsilon(1e-10));
  }
}

TEST_CASE("sine power integral")
{
  CHECK(sine_power_integral(1.0, std::numbers::pi / 2) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(sine_power_integral(1.0, 1.0) == doctest::Approx(1.0 - std::cos(1.0)).epsilon(1e-13));
  for (double a : {0.25, 0.5, 0.75})
  {
    // int_0^{pi/2} sin^a = B((a+1)/2, 1/2) / 2
    CHECK(sine_power_integral(a, std::numbers::pi / 2) ==
          doctest::Approx(0.5 * std::beta(0.5 * (a + 1), 0.5)).epsilon(1e-11));
  }
}

TEST_CASE("discrete quotients are scale invariant")
{
  const Grid g = Grid::interval_span(0.0, 1.0, 64);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.1, 1.0), c(0.01, 100.0);
  Eigen::VectorXd w(g.space_size());
  for (int i = 0; i < w.size(); ++i)
  {
    w[i] = u(rng);
  }
  const MediumParams pl = MediumParams::plaplace(3.5);
  const MediumParams pm = MediumParams::pme(2.5);
  for (int s = 0; s < 10; ++s)
  {
    const double k = c(rng);
    CHECK(discrete_quotient(g, k * w, pl, Equation::PLaplace) ==
          doctest::Approx(discrete_quotient(g, w, pl, Equation::PLaplace)).epsilon(1e-10));
    CHECK(discrete_quotient(g, k * w, pm, Equation::PME) ==
          doctest::Approx(discrete_quotient(g, w, pm, Equation::PME)).epsilon(1e-10));
  }
}

TEST_CASE("p-Laplace minimizer matches the first integral")
{
  for (double p : {3.0, 4.0})
  {
    const MediumParams mp = MediumParams::plaplace(p);
    const Grid g = Grid::interval_span(0.0, 1.0, 256);
    const EigenResult e = minimize_quotient(g, mp, Equation::PLaplace);
    const FirstIntegral1D o = first_integral_oracle(p, 1.0);
    CHECK(std::abs(e.max() - o.M) / o.M < 1e-3);
    CHECK(e.residual < 1e-6);
    CHECK(e.J0 * std::pow(e.normC, p - 2) == doctest::Approx(1.0 / (p - 2)).epsilon(1e-12));
    CHECK(e.U[0] == 0.0);
    CHECK(e.U[g.space_size() - 1] == 0.0);
    CHECK((e.U.array() >= 0.0).all());
    for (std::size_t k = 1; k < e.history.size(); ++k)
    {
      CHECK(e.history[k] <= e.history[k - 1] * (1 + 1e-14));
    }
    const Eigen::VectorXd ref = profile_from_first_integral(p, 1.0, 256);
    CHECK((e.U - ref).cwiseAbs().maxCoeff() / o.M < 2e-3);
    CHECK(e.decay_exponent() == doctest::Approx(1.0 / (p - 2)));
    CHECK(euler_lagrange_residual(g, e.U, mp, Equation::PLaplace) == doctest::Approx(e.residual).epsilon(1e-6));
  }
}

TEST_CASE("friendly giant matches its first integral")
{
  for (double m : {2.0, 3.0})
  {
    const MediumParams mp = MediumParams::pme(m);
    const EigenResult e = minimize_quotient(Grid::interval_span(0.0, 1.0, 256), mp, Equation::PME);
    const GiantFirstIntegral1D o = giant_first_integral_oracle(m, 1.0);
    CHECK(o.Gmax == doctest::Approx(std::pow(o.W, 1.0 / m)));
    CHECK(std::abs(e.max() - o.Gmax) / o.Gmax < 1e-3);
    CHECK(e.J0 * std::pow(e.normC, m - 1) == doctest::Approx(1.0 / (m - 1)).epsilon(1e-12));
    const Eigen::VectorXd ref = giant_profile_from_first_integral(m, 1.0, 256);
    CHECK((e.U - ref).cwiseAbs().maxCoeff() / o.Gmax < 5e-3);
  }
}

TEST_CASE("profile refinement reduces the oracle error")
{
  const MediumParams mp = MediumParams::plaplace(3.0);
  const double M = first_integral_oracle(3.0, 1.0).M;
  double previous = INFINITY;
  for (int cells : {32, 64, 128})
  {
    const EigenResult e = minimize_quotient(Grid::interval_span(0.0, 1.0, cells), mp, Equation::PLaplace);
    const double err = std::abs(e.max() - M);
    CHECK(err < previous);
    previous = err;
  }
}

TEST_CASE("square domain minimizer is symmetric")
{
  const MediumParams mp = MediumParams::plaplace(3.0, 2);
  const int N = 17;
  const Grid g = Grid::box2d(Point::Zero(), 1.0 / (N - 1), N, N);
  const EigenResult e = minimize_quotient(g, mp, Equation::PLaplace);
  CHECK(e.residual < 1e-5);
  for (int i = 0; i < N; ++i)
  {
    for (int j = 0; j < N; ++j)
    {
      CHECK(e.U[g.flat_index(i, j)] == doctest::Approx(e.U[g.flat_index(j, i)]).epsilon(1e-5));
      CHECK(e.U[g.flat_index(i, j)] == doctest::Approx(e.U[g.flat_index(N - 1 - i, j)]).epsilon(1e-5));
    }
  }
  const Point c(0.5, 0.5);
  CHECK(e.value_at(c) == doctest::Approx(e.max()));
  CHECK_THROWS_AS(e.value_at(Point(2.0, 0.5)), DomainError);
}

TEST_CASE("eigen solver rejects inadmissible exponents")
{
  const Grid g = Grid::interval_span(0.0, 1.0, 16);
  MediumParams bad;
  bad.p = 2.0;
  CHECK_THROWS_AS(minimize_quotient(g, bad, Equation::PLaplace), ParameterError);
  CHECK_THROWS_AS(first_integral_oracle(2.0, 1.0), ParameterError);
  CHECK_THROWS_AS(giant_first_integral_oracle(1.0, 1.0), ParameterError);
}

TEST_CASE("minimal quotient scales with the domain measure")
{
  for (double p : {3.0, 4.0})
  {
    const MediumParams mp = MediumParams::plaplace(p);
    const double J1 = minimize_quotient(Grid::interval_span(0.0, 1.0, 256), mp, Equation::PLaplace).J0;
    const double J2 = minimize_quotient(Grid::interval_span(0.0, 2.0, 256), mp, Equation::PLaplace).J0;
    const double expected = std::pow(2.0, 1.0 - p - p / 2.0);
    CHECK(std::abs(J2 / J1 - expected) / expected < 0.02);
  }
}

TEST_CASE("restart from the negated minimizer reproduces the minimum")
{
  const MediumParams mp = MediumParams::plaplace(3.0);
  const Grid g = Grid::interval_span(0.0, 1.0, 128);
  const EigenResult e = minimize_quotient(g, mp, Equation::PLaplace);
  MinimizerOptions opts;
  opts.initial_guess = Eigen::VectorXd(-e.w);
  const EigenResult r = minimize_quotient(g, mp, Equation::PLaplace, opts);
  CHECK(r.J0 == doctest::Approx(e.J0).epsilon(1e-9));
  CHECK((r.U.array() >= 0.0).all());
}

TEST_CASE("p = 4 profile maximum within half a percent of the oracle")
{
  const EigenResult e =
      minimize_quotient(Grid::interval_span(0.0, 1.0, 1024), MediumParams::plaplace(4.0), Equation::PLaplace);
  const double M = first_integral_oracle(4.0, 1.0).M;
  CHECK(std::abs(e.max() - M) / M < 5e-3);
}

TEST_CASE("first-integral constant and doubling ratios")
{
  for (double p : {2.5, 4.0, 6.0})
  {
    const FirstIntegral1D a = first_integral_oracle(p, 1.0), b = first_integral_oracle(p, 2.0);
    CHECK(a.integration_constant == doctest::Approx(a.M * a.M / (2.0 * (p - 2.0))).epsilon(1e-13));
    CHECK(b.M / a.M == doctest::Approx(std::pow(2.0, p / (p - 2.0))).epsilon(1e-3));
    CHECK(b.slope0 / a.slope0 == doctest::Approx(std::pow(2.0, 2.0 / (p - 2.0))).epsilon(1e-3));
  }
  CHECK(first_integral_oracle(4.0, 2.0).M / first_integral_oracle(4.0, 1.0).M == doctest::Approx(4.0));
}

TEST_CASE("first-integral profile is symmetric and solves the ODE")
{
  const double p = 3.0;
  const FirstIntegral1D o = first_integral_oracle(p, 1.0);
  double previous = INFINITY;
  for (int cells : {32, 64, 128, 256})
  {
    const Eigen::VectorXd U = profile_from_first_integral(p, 1.0, cells);
    CHECK(U[cells / 2] == doctest::Approx(o.M).epsilon(1e-12));
    for (int i = 0; i <= cells; ++i)
    {
      CHECK(U[i] == doctest::Approx(U[cells - i]).epsilon(1e-12));
    }
    const double r = euler_lagrange_residual(Grid::interval_span(0.0, 1.0, cells), U, MediumParams::plaplace(p),
                                             Equation::PLaplace);
    CHECK(r < previous);
    previous = r;
  }
}

TEST_CASE("giant first integral holds along its own profile")
{
  const double m = 2.0;
  const GiantFirstIntegral1D o = giant_first_integral_oracle(m, 1.0);
  // Differentiate (1/2) w'^2 + (m/(m+1)) w^{(m+1)/m} / (m-1) along the profile by differences.
  const int cells = 4096;
  const Eigen::VectorXd G = giant_profile_from_first_integral(m, 1.0, cells);
  const double h = 1.0 / cells;
  double spread = 0.0;
  for (int i = 64; i < cells - 64; i += 64)
  {
    const double w0 = std::pow(G[i - 1], m), w1 = std::pow(G[i + 1], m), w = std::pow(G[i], m);
    const double dw = (w1 - w0) / (2 * h);
    const double energy = 0.5 * dw * dw + m / (m + 1) * std::pow(w, (m + 1) / m) / (m - 1);
    spread = std::max(spread, std::abs(energy - o.integration_constant) / o.integration_constant);
  }
  CHECK(spread < 1e-3);
  CHECK(0.5 * o.slope0 * o.slope0 == doctest::Approx(o.integration_constant).epsilon(1e-10));

  double previous = INFINITY;
  for (int n : {32, 64, 128})
  {
    const double r = euler_lagrange_residual(Grid::interval_span(0.0, 1.0, n), giant_profile_from_first_integral(m, 1.0, n),
                                             MediumParams::pme(m), Equation::PME);
    CHECK(r < previous);
    previous = r;
  }
}

TEST_CASE("iteration budget exhaustion reports the last residual")
{
  MinimizerOptions opts;
  opts.max_iterations = 2;
  try
  {
    minimize_quotient(Grid::interval_span(0.0, 1.0, 256), MediumParams::plaplace(3.0), Equation::PLaplace, opts);
    FAIL("expected a convergence error");
  }
  catch (const ConvergenceError &e)
  {
    CHECK(e.last_residual() > 0.0);
  }
}
