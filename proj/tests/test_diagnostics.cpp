// Copyright 2026 The slowdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include <doctest.h>

#include "slowdiff/diagnostics.hpp"
#include "slowdiff/eigenfunctions.hpp"
#include "slowdiff/evolution.hpp"
#include "slowdiff/exact_solutions.hpp"

using namespace slowdiff;

namespace
{

BarenblattSpec barenblatt(double p = 3.0)
{
  BarenblattSpec b;
  b.params = MediumParams::plaplace(p);
  return b;
}

struct Separable
{
  EigenResult eigen;
  SpaceTimeFunction v;
  Grid sampling;
  double t0;
};

Separable separable(double p = 3.0, double t0 = 0.3)
{
  const MediumParams mp = MediumParams::plaplace(p);
  Separable s{minimize_quotient(Grid::interval_span(-1.0, 1.0, 256), mp, Equation::PLaplace), {},
              Grid::interval_span(-1.0, 1.0, 256, 0.0, 1.0, 200), t0};
  s.v = separable_function({s.eigen, t0});
  return s;
}

SingularHint slice_hint(const Separable &s)
{
  return SingularHint::time_slice(s.t0, Cylinder::interval(-1.0, 1.0, 0.0, 1.0), 0.5 * (1.0 - s.t0));
}

int rank(Verdict v)
{
  return v == Verdict::Finite ? 0 : v == Verdict::Inconclusive ? 1 : 2;
}

}  // namespace

TEST_CASE("time-slice shells follow the analytic power law")
{
  // int (t - t0)^{-a} over the shell (tau_{k+1}, tau_k) scales like 4^{a - 1} per shell.
  const SpaceTimeFunction v = [](const Point &, double t) { return t > 0.0 ? 1.0 / t : 0.0; };
  const SingularHint hint = SingularHint::time_slice(0.0, Cylinder::interval(-1.0, 1.0, 0.0, 1.0), 0.5);
  const SummabilityReport half = classify_summability(v, 1, hint, 0.5);
  CHECK(half.verdict == Verdict::Finite);
  CHECK(half.tail_ratio == doctest::Approx(0.5).epsilon(1e-9));
  const SummabilityReport one = classify_summability(v, 1, hint, 1.0);
  CHECK(one.verdict == Verdict::Divergent);
  CHECK(one.tail_ratio == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(one.shells.size() == 8);
  for (std::size_t k = 1; k < one.shells.size(); ++k)
  {
    CHECK(one.shells[k].scale == doctest::Approx(0.25 * one.shells[k - 1].scale));
  }
}

TEST_CASE("barenblatt point shells separate q below and at the critical exponent")
{
  const BarenblattSpec b = barenblatt();
  const SingularHint hint = SingularHint::point(Point::Zero(), 0.0, 1.0, 1.0, 4.0);
  CHECK(classify_summability(barenblatt_function(b), 1, hint, 4.0).verdict == Verdict::Finite);
  const SummabilityReport at = classify_summability(barenblatt_function(b), 1, hint, 5.0);
  CHECK(at.verdict == Verdict::Divergent);
  CHECK(at.tail_ratio == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("separable field verdicts around the class threshold")
{
  const Separable s = separable();
  SummabilityOptions so;
  so.spatial_nodes = s.sampling.spatial();
  CHECK(classify_summability(s.v, 1, slice_hint(s), 1.0, so).verdict == Verdict::Divergent);
  CHECK(classify_summability(s.v, 1, slice_hint(s), 0.5, so).verdict == Verdict::Finite);
  CHECK(classify_summability(s.v, 1, slice_hint(s), 0.25, so).verdict == Verdict::Finite);
  // Close to the threshold the geometric tail is too slow for the margin.
  CHECK(classify_summability(s.v, 1, slice_hint(s), 0.9, so).verdict != Verdict::Divergent);
}

TEST_CASE("verdicts are monotone in q")
{
  const Separable s = separable();
  SummabilityOptions so;
  so.spatial_nodes = s.sampling.spatial();
  const BarenblattSpec b = barenblatt();
  const SingularHint point = SingularHint::point(Point::Zero(), 0.0, 1.0, 1.0, 4.0);
  int last_sep = 0, last_bar = 0;
  for (double q = 0.25; q <= 6.0; q += 0.25)
  {
    const int rs = rank(classify_summability(s.v, 1, slice_hint(s), q, so).verdict);
    const int rb = rank(classify_summability(barenblatt_function(b), 1, point, q).verdict);
    if (last_sep == 2)
    {
      CHECK(rs >= 1);
    }
    if (last_bar == 2)
    {
      CHECK(rb >= 1);
    }
    last_sep = std::max(last_sep, rs);
    last_bar = std::max(last_bar, rb);
  }
  CHECK(last_sep == 2);
  CHECK(last_bar == 2);
}

TEST_CASE("sampled shells stop at grid resolution")
{
  const Grid coarse = Grid::interval_span(-1.0, 1.0, 16, 0.0, 1.0, 8);
  const ScalarField f = sample([](const Point &, double t) { return t > 0.0 ? 1.0 / t : 0.0; }, coarse);
  const SingularHint hint = SingularHint::time_slice(0.0, Cylinder::interval(-1.0, 1.0, 0.0, 1.0), 0.5);
  const SummabilityReport r = classify_summability(f, hint, 1.0);
  CHECK(r.verdict == Verdict::Inconclusive);
  CHECK(!r.note.empty());
}

TEST_CASE("class labels for the corpus fields")
{
  const Separable s = separable();
  const ClassVerdict m = classify_field(s.v, s.sampling, s.eigen.params);
  CHECK(m.label == ClassLabel::M);
  REQUIRE(m.t0_detected.has_value());
  CHECK(std::abs(*m.t0_detected - s.t0) <= 5 * s.sampling.dt);
  double core_min = INFINITY;
  for (int i = 0; i < s.sampling.space_size(); ++i)
  {
    const Point x = s.sampling.node(i);
    if (std::abs(x[0]) <= 0.5 + 1e-12)
    {
      core_min = std::min(core_min, s.eigen.value_at(x));
    }
  }
  CHECK(std::abs(m.minorant_floor - core_min) / core_min <= 0.05);

  BarenblattSpec b = barenblatt();
  b.t0 = -0.5;
  const ClassVerdict bv = classify_field(barenblatt_function(b), Grid::interval_span(-2.0, 2.0, 128, 0.0, 1.0, 100),
                                         b.params);
  CHECK(bv.label == ClassLabel::B);

  const ClassVerdict z =
      classify_field([](const Point &, double) { return 0.0; }, s.sampling, MediumParams::plaplace(3.0));
  CHECK(z.label == ClassLabel::B);
}

TEST_CASE("lateral boundary boundedness")
{
  BarenblattSpec b = barenblatt();
  const Grid away = Grid::interval_span(0.5, 2.0, 64, 0.0, 1.0, 100);
  CHECK(boundary_boundedness_check(barenblatt_function(b), away));
  CHECK(boundary_boundedness_check(sample(barenblatt_function(b), away)));
  const Grid g = Grid::interval_span(-1.0, 1.0, 64, 0.0, 1.0, 100);
  CHECK(boundary_boundedness_check([](const Point &, double) { return 3.0; }, g));

  // Boundary values of the separable field on a larger domain blow up at t0.
  const MediumParams mp = MediumParams::plaplace(3.0);
  const EigenResult wide = minimize_quotient(Grid::interval_span(-2.0, 2.0, 256), mp, Equation::PLaplace);
  CHECK(!boundary_boundedness_check(separable_function({wide, 0.3}), g));
}

TEST_CASE("harnack constants on a constant solution")
{
  const Grid d = Grid::interval_span(-1.0, 1.0, 128, 0.0, 1.0, 100);
  HarnackOptions o;
  o.samples = 20;
  o.C_used = 0.5;
  const HarnackReport r = harnack_check([](const Point &, double) { return 1.0; }, d, MediumParams::plaplace(3.0),
                                        Equation::PLaplace, o);
  REQUIRE(!r.samples.empty());
  CHECK(r.gamma_measured == doctest::Approx(1.0));
  for (const HarnackSample &s : r.samples)
  {
    CHECK(s.theta == doctest::Approx(0.5 * std::pow(s.R, 3.0)));
  }
  CHECK_THROWS_AS(harnack_check([](const Point &, double) { return 0.0; }, d, MediumParams::plaplace(3.0),
                                Equation::PLaplace, o),
                  ConfigError);
}

TEST_CASE("harnack estimate on barenblatt is stable and scale invariant")
{
  const BarenblattSpec b = barenblatt();
  const double X = 0.7 * barenblatt_support_radius(b, 0.5);
  const Grid d = Grid::interval_span(-X, X, 256, 0.5, 2.0, 100);
  const SpaceTimeFunction u = barenblatt_function(b);
  HarnackOptions o;
  o.samples = 100;
  const double g1 = harnack_check(u, d, b.params, Equation::PLaplace, o).gamma_measured;
  o.samples = 200;
  const double g2 = harnack_check(u, d, b.params, Equation::PLaplace, o).gamma_measured;
  CHECK(std::isfinite(g1));
  CHECK(std::abs(g2 - g1) / g1 <= 0.1);

  // kappa u(x, kappa^{p-2} t) solves the same equation.
  const double kappa = 3.0;
  const SpaceTimeFunction uk = [u, kappa](const Point &x, double t) { return kappa * u(x, kappa * t); };
  const Grid dk = Grid::interval_span(-X, X, 256, 0.5 / kappa, 2.0 / kappa, 100);
  o.samples = 100;
  const double gk = harnack_check(uk, dk, b.params, Equation::PLaplace, o).gamma_measured;
  CHECK(std::abs(gk - g1) / g1 <= 0.01);
  // Same seed, same samples.
  CHECK(harnack_check(u, d, b.params, Equation::PLaplace, o).gamma_measured == g1);
}

TEST_CASE("smooth cutoff")
{
  const Cutoff z{Point(0.5, 0.0), 1.0};
  CHECK(z.value(Point(0.5, 0.0), 1) == doctest::Approx(1.0));
  CHECK(z.value(Point(1.6, 0.0), 1) == 0.0);
  for (double x : {-0.3, 0.1, 0.7, 1.2})
  {
    const double e = 1e-6;
    const double fd = (z.value(Point(x + e, 0.0), 1) - z.value(Point(x - e, 0.0), 1)) / (2 * e);
    CHECK(z.gradient(Point(x, 0.0), 1)[0] == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("caccioppoli terms on trivial fields")
{
  const Grid g = Grid::interval_span(-2.0, 2.0, 256, 0.0, 1.0, 20);
  const Cutoff z{Point::Zero(), 1.5};
  const CaccioppoliReport zero = caccioppoli_check(sample([](const Point &, double) { return 0.0; }, g), z, 0.0, 1.0, 3.0);
  CHECK(zero.lhs == 0.0);
  CHECK(zero.energy == 0.0);

  double zeta_p = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i)
  {
    const double x = -1.5 + 3.0 * (i + 0.5) / n;
    zeta_p += std::pow(z.value(Point(x, 0.0), 1), 3.0) * 3.0 / n;
  }
  const CaccioppoliReport c = caccioppoli_check(sample([](const Point &, double) { return 2.0; }, g), z, 0.0, 1.0, 3.0);
  CHECK(c.energy == doctest::Approx(0.0));
  CHECK(c.sup_slice == doctest::Approx(4.0 * zeta_p).epsilon(1e-3));
  CHECK(std::isfinite(c.ratio));

  CHECK_THROWS_AS(caccioppoli_check(sample([](const Point &, double) { return 1.0; }, g), Cutoff{Point::Zero(), 3.0}, 0.0,
                                    1.0, 3.0),
                  ContractError);
}

TEST_CASE("caccioppoli ratio stays bounded under refinement")
{
  const BarenblattSpec b = barenblatt();
  const double X = 1.1 * barenblatt_support_radius(b, 1.0);
  double lo = INFINITY, hi = 0.0;
  for (int cells : {64, 128})
  {
    EvolutionProblem pr;
    pr.params = b.params;
    pr.grid = Grid::interval_span(-X, X, cells, 0.5, 1.0, 20);
    pr.initial.resize(cells + 1);
    for (int i = 0; i <= cells; ++i)
    {
      pr.initial[i] = barenblatt_eval(b, pr.grid.node(i), 0.5);
    }
    const CaccioppoliReport c = caccioppoli_check(evolve(pr).field, Cutoff{Point::Zero(), 1.5}, 0.5, 1.0, 3.0);
    CHECK(c.lhs > 0.0);
    lo = std::min(lo, c.ratio);
    hi = std::max(hi, c.ratio);
  }
  CHECK(hi / lo <= 2.0);
}
