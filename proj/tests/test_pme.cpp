// Copyright 2026 The slowdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include <doctest.h>

#include "slowdiff/diagnostics.hpp"
#include "slowdiff/evolution.hpp"
#include "slowdiff/pme.hpp"

using namespace slowdiff;

namespace
{

const MediumParams kM2 = MediumParams::pme(2.0);

PMESeparableSpec giant(double t0 = 0.3, int cells = 256)
{
  return make_pme_separable(Grid::interval_span(-1.0, 1.0, cells), kM2, t0);
}

ScalarField bounded_bump(int cells, double T)
{
  EvolutionProblem pr;
  pr.params = kM2;
  pr.equation = Equation::PME;
  pr.grid = Grid::interval_span(-1.0, 1.0, cells, 0.0, T, 100);
  pr.initial.resize(cells + 1);
  for (int i = 0; i <= cells; ++i)
  {
    const double x = pr.grid.coord(0, i);
    pr.initial[i] = 0.2 + std::exp(-10.0 * x * x);
  }
  pr.left = BoundaryData::dirichlet(pr.initial[0]);
  pr.right = BoundaryData::dirichlet(pr.initial[cells]);
  return evolve(pr).field;
}

}  // namespace

TEST_CASE("pme separable formula")
{
  const PMESeparableSpec s = giant();
  const Point x(0.2, 0.0);
  const double G = s.giant.value_at(x);
  CHECK(pme_separable_eval(s, x, 0.3) == 0.0);
  CHECK(pme_separable_eval(s, x, 0.0) == 0.0);
  CHECK(pme_separable_eval(s, Point(1.0, 0.0), 0.8) == 0.0);
  CHECK(pme_separable_eval(s, x, 0.8) == doctest::Approx(2.0 * G));
  // Doubling t - t0 scales by 2^{-1/(m-1)}.
  CHECK(pme_separable_eval(s, x, 1.3) == doctest::Approx(0.5 * pme_separable_eval(s, x, 0.8)));
  CHECK_THROWS_AS(pme_separable_eval(s, Point(1.5, 0.0), 0.8), DomainError);
  CHECK(pme_separable_function(s)(x, 0.55) == doctest::Approx(4.0 * G));
}

TEST_CASE("friendly giant oracle agreement and residual convergence")
{
  const PMESeparableSpec s = make_pme_separable(Grid::interval_span(0.0, 1.0, 512), kM2, 0.0);
  const GiantFirstIntegral1D o = giant_first_integral_oracle(2.0, 1.0);
  CHECK(std::abs(s.giant.max() - o.Gmax) / o.Gmax < 5e-3);
  CHECK((s.giant.U.array() >= 0.0).all());
  double previous = INFINITY;
  for (int cells : {32, 64, 128})
  {
    const double r = euler_lagrange_residual(Grid::interval_span(0.0, 1.0, cells),
                                             giant_profile_from_first_integral(2.0, 1.0, cells), kM2, Equation::PME);
    CHECK(r < previous);
    previous = r;
  }
}

TEST_CASE("pme classification")
{
  const PMESeparableSpec s = giant();
  const Grid sampling = Grid::interval_span(-1.0, 1.0, 256, 0.0, 1.0, 200);
  const ClassVerdict m = pme_classify(pme_separable_function(s), sampling, kM2);
  CHECK(m.label == ClassLabel::M);
  CHECK(m.threshold_q == doctest::Approx(1.0));
  REQUIRE(m.t0_detected.has_value());
  CHECK(std::abs(*m.t0_detected - 0.3) <= 5 * sampling.dt);
  CHECK(m.minorant_floor > 0.0);

  SummabilityOptions so;
  so.spatial_nodes = sampling.spatial();
  const SingularHint hint = SingularHint::time_slice(0.3, Cylinder::interval(-1.0, 1.0, 0.0, 1.0), 0.35);
  CHECK(classify_summability(pme_separable_function(s), 1, hint, 1.0, so).verdict == Verdict::Divergent);
  CHECK(classify_summability(pme_separable_function(s), 1, hint, 0.5, so).verdict == Verdict::Finite);

  const ScalarField bump = bounded_bump(128, 0.5);
  CHECK(pme_classify(as_function(bump), bump.grid(), kM2).label == ClassLabel::B);
  CHECK(pme_classify([](const Point &, double) { return 0.0; }, sampling, kM2).label == ClassLabel::B);
}

TEST_CASE("truncated power gradients")
{
  const Grid g = Grid::interval_span(-1.0, 1.0, 64, 0.0, 1.0, 32);
  const Cylinder w = grid_extent(g);
  CHECK(pme_truncation_gradient_check(sample([](const Point &, double) { return 0.0; }, g), 2.0, 5.0, w) == 0.0);
  CHECK(pme_truncation_gradient_check(sample([](const Point &, double) { return 1.7; }, g), 2.0, 5.0, w) == 0.0);

  // Linear v^m: |grad min(v^m, j)|^2 = 1 where v^m < j.
  const ScalarField lin = sample([](const Point &x, double) { return std::sqrt(x[0] + 1.0); }, g);
  CHECK(pme_truncation_gradient_check(lin, 2.0, 10.0, Cylinder::interval(-1.0, 1.0, 0.0, 1.0)) ==
        doctest::Approx(2.0).epsilon(1e-9));

  const PMESeparableSpec s = giant();
  const Grid dense = Grid::interval_span(-1.0, 1.0, 128, 0.3, 0.55, 2000);
  const ScalarField sf = sample(pme_separable_function(s), dense);
  double previous = 0.0;
  for (double j : {1.0, 10.0, 100.0, 1000.0})
  {
    const double e = pme_truncation_gradient_check(sf, 2.0, j, grid_extent(dense));
    CHECK(e > 2.0 * previous);
    previous = e;
  }

  const ScalarField bump = bounded_bump(64, 0.5);
  const double top = std::pow(bump.max(), 2.0);
  const double e1 = pme_truncation_gradient_check(bump, 2.0, 2.0 * top, grid_extent(bump.grid()));
  const double e2 = pme_truncation_gradient_check(bump, 2.0, 20.0 * top, grid_extent(bump.grid()));
  CHECK(e1 == e2);
  CHECK(e1 > 0.0);
}

TEST_CASE("evolved source profile matches the closed form for m = 2")
{
  // m = 2, n = 1: U = t^{-1/3} (A - x^2 t^{-2/3} / 12)_+ with mass (4/3) sqrt(12) A^{3/2} = 1.
  const double A = std::pow(3.0 / (4.0 * std::sqrt(12.0)), 2.0 / 3.0);
  PMEProfileOptions opts;
  opts.cells = 512;
  const PMEProfile prof = evolve_pme_profile(kM2, opts);
  CHECK(prof.alpha == doctest::Approx(1.0 / 3.0));
  CHECK(prof.beta == doctest::Approx(1.0 / 3.0));
  // The last positive node carries the discrete front tail.
  CHECK(prof.support_radius() >= 0.99 * std::sqrt(12.0 * A));
  CHECK(prof.support_radius() <= 1.1 * std::sqrt(12.0 * A));
  double err = 0.0;
  for (double xi = -2.0; xi <= 2.0; xi += 0.01)
  {
    err = std::max(err, std::abs(prof.profile(xi) - std::max(0.0, A - xi * xi / 12.0)));
  }
  CHECK(err / A < 0.02);
  // Self-similar evaluation and the power gradient at t = 8, where x t^{-1/3} = x / 2.
  const Point x(0.6, 0.0);
  CHECK(pme_profile_eval(prof, x, 8.0) == doctest::Approx(0.5 * prof.profile(0.3)));
  // |d/dx U^2| = t^{-1} 2 (A - xi^2 / 12) xi / 6 at xi = 0.3.
  const double exact_grad = 2.0 * (A - 0.09 / 12.0) * 0.05 / 8.0;
  CHECK(std::abs(pme_profile_power_gradient(prof, x, 8.0) - exact_grad) / exact_grad < 0.05);
  CHECK(pme_profile_function(prof)(x, 8.0) == doctest::Approx(pme_profile_eval(prof, x, 8.0)));
}

TEST_CASE("harnack on an evolved positive pme solution")
{
  const ScalarField bump = bounded_bump(128, 1.0);
  HarnackOptions o;
  o.samples = 100;
  const HarnackReport r1 = harnack_check(as_function(bump), bump.grid(), kM2, Equation::PME, o);
  o.samples = 200;
  const HarnackReport r2 = harnack_check(as_function(bump), bump.grid(), kM2, Equation::PME, o);
  CHECK(std::isfinite(r1.gamma_measured));
  CHECK(std::abs(r2.gamma_measured - r1.gamma_measured) / r1.gamma_measured <= 0.1);
  for (const HarnackSample &s : r1.samples)
  {
    CHECK(s.theta == doctest::Approx(s.R * s.R / s.lhs));
  }
}

TEST_CASE("pme parameters are validated")
{
  CHECK_THROWS_AS(make_pme_separable(Grid::interval_span(-1.0, 1.0, 16), MediumParams::plaplace(3.0), 0.0),
                  ParameterError);
  MediumParams bad = kM2;
  bad.m = 0.5;
  CHECK_THROWS_AS(evolve_pme_profile(bad), ParameterError);
}
