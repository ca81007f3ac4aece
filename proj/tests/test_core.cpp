// Copyright 2026 The slowdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "slowdiff/core.hpp"

using namespace slowdiff;

TEST_CASE("derived constants for the p-Laplace branch")
{
  const DerivedConstants d = derived_constants(MediumParams::plaplace(3.0, 1));
  CHECK(d.lambda == doctest::Approx(4.0));
  CHECK(d.q_crit == doctest::Approx(5.0));
  CHECK(d.qgrad_crit == doctest::Approx(2.5));
  CHECK(d.class_threshold == doctest::Approx(1.0));
  CHECK(d.decay_exponent == doctest::Approx(1.0));

  const DerivedConstants d2 = derived_constants(MediumParams::plaplace(4.0, 2));
  CHECK(d2.lambda == doctest::Approx(8.0));
  CHECK(d2.q_crit == doctest::Approx(5.0));
  CHECK(d2.qgrad_crit == doctest::Approx(3.0 + 1.0 / 3.0));
  CHECK(d2.decay_exponent == doctest::Approx(0.5));
}

TEST_CASE("derived constants for the porous medium branch")
{
  const DerivedConstants d = derived_constants(MediumParams::pme(2.0, 1), Equation::PME);
  CHECK(d.lambda == doctest::Approx(3.0));
  CHECK(d.q_crit == doctest::Approx(4.0));
  CHECK(d.qgrad_crit == doctest::Approx(4.0 / 3.0));
  CHECK(d.class_threshold == doctest::Approx(1.0));
  CHECK(d.decay_exponent == doctest::Approx(1.0));

  const DerivedConstants d3 = derived_constants(MediumParams::pme(3.0, 2), Equation::PME);
  CHECK(d3.lambda == doctest::Approx(6.0));
  CHECK(d3.q_crit == doctest::Approx(4.0));
  CHECK(d3.qgrad_crit == doctest::Approx(1.0 + 1.0 / 7.0));
  CHECK(d3.decay_exponent == doctest::Approx(0.5));
}

TEST_CASE("parameter validation rejects fast and linear diffusion")
{
  CHECK_THROWS_AS(MediumParams::plaplace(2.0).validate(Equation::PLaplace), ParameterError);
  CHECK_THROWS_AS(MediumParams::plaplace(1.5).validate(Equation::PLaplace), ParameterError);
  CHECK_THROWS_AS(MediumParams::plaplace(3.0, 0).validate(Equation::PLaplace), ParameterError);
  CHECK_THROWS_AS(MediumParams::pme(1.0).validate(Equation::PME), ParameterError);
  CHECK_THROWS_AS(MediumParams::plaplace(3.0).validate(Equation::PME), ParameterError);
  CHECK_NOTHROW(MediumParams::plaplace(2.5, 3).validate(Equation::PLaplace));
  CHECK_NOTHROW(MediumParams::pme(1.5, 2).validate(Equation::PME));
}

TEST_CASE("grid layout and node coordinates")
{
  const Grid g = Grid::interval_span(-1.0, 3.0, 8, 0.5, 1.5, 4);
  CHECK(g.space_size() == 9);
  CHECK(g.time_size() == 5);
  CHECK(g.h == doctest::Approx(0.5));
  CHECK(g.dt == doctest::Approx(0.25));
  CHECK(g.node(0)[0] == doctest::Approx(-1.0));
  CHECK(g.node(8)[0] == doctest::Approx(3.0));
  CHECK(g.t_end() == doctest::Approx(1.5));
  CHECK(g.spatial().steps == 0);

  const Grid b = Grid::box2d(Point(1.0, -1.0), 0.25, 5, 3);
  CHECK(b.space_size() == 15);
  CHECK(b.spatial_dims() == 2);
  const Point x = b.node(b.flat_index(4, 2));
  CHECK(x[0] == doctest::Approx(2.0));
  CHECK(x[1] == doctest::Approx(-0.5));
}

TEST_CASE("invalid grids are rejected")
{
  Grid g = Grid::interval(0.0, 0.1, 11);
  g.h = -1.0;
  CHECK_THROWS(g.validate());
  Grid one = Grid::interval(0.0, 0.1, 11);
  one.counts[0] = 1;
  CHECK_THROWS(one.validate());
}

TEST_CASE("box difference partitions the outer box")
{
  const Cylinder outer{Point(0.0, 0.0), Point(2.0, 1.0), -1.0, 1.0};
  const Cylinder inner{Point(0.5, 0.0), Point(0.5, 0.5), -0.25, 0.5};
  for (int dims : {1, 2})
  {
    auto vol = [dims](const Cylinder &c) {
      double v = c.t2 - c.t1;
      for (int a = 0; a < dims; ++a)
      {
        v *= 2.0 * c.half[a];
      }
      return v;
    };
    const auto pieces = box_difference(outer, inner, dims);
    CHECK(pieces.size() <= static_cast<std::size_t>(2 * (dims + 1)));
    double total = 0.0;
    for (const Cylinder &c : pieces)
    {
      total += vol(c);
      CHECK(outer.contains(c, dims));
    }
    CHECK(total == doctest::Approx(vol(outer) - vol(inner)));

    // Random points land in exactly one piece or in the inner box.
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ux(-1.999, 1.999), uy(-0.999, 0.999), ut(-0.999, 0.999);
    for (int s = 0; s < 500; ++s)
    {
      const Point x(ux(rng), dims == 2 ? uy(rng) : 0.0);
      const double t = ut(rng);
      int hits = inner.contains(x, t, dims) ? 1 : 0;
      for (const Cylinder &c : pieces)
      {
        hits += c.contains(x, t, dims) ? 1 : 0;
      }
      CHECK(hits == 1);
    }
  }
}

TEST_CASE("q-norm integral is exact for affine integrands")
{
  const Grid g = Grid::interval_span(0.0, 1.0, 20, 0.0, 1.0, 10);
  const ScalarField f = sample([](const Point &x, double t) { return 1.0 + x[0] + 2.0 * t; }, g);
  // int_0^1 int_0^1 (1 + x + 2t) dx dt = 2.5
  CHECK(integrate_q_norm(f, Cylinder::interval(0.0, 1.0, 0.0, 1.0), 1.0) ==
        doctest::Approx(2.5).epsilon(1e-12));
  // The grid extent adds half cells on every side.
  CHECK(integrate_q_norm(f, grid_extent(g), 1.0) == doctest::Approx(1.05 * 1.1 * 2.5).epsilon(1e-12));
  const ScalarField one = sample([](const Point &, double) { return 1.0; }, g);
  CHECK(integrate_q_norm(one, Cylinder::interval(0.2, 0.7, 0.1, 0.6), 3.0) ==
        doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("radial cells carry the spherical weight")
{
  // Volume of the unit ball in R^3 from a radial grid.
  const Grid g = Grid::radial(1.0 / 400, 401, 3, 0.0, 1.0, 1);
  const ScalarField one = sample([](const Point &, double) { return 1.0; }, g);
  Cylinder c = grid_extent(g);
  c.half[0] = 1.0;
  c.center[0] = 0.0;
  c.t1 = 0.0;
  c.t2 = 1.0;
  CHECK(integrate_q_norm(one, c, 1.0) == doctest::Approx(4.0 * std::numbers::pi / 3.0).epsilon(1e-4));
}

TEST_CASE("interpolation reproduces bilinear functions")
{
  const Grid g = Grid::interval_span(-1.0, 1.0, 10, 0.0, 1.0, 5);
  auto f = [](const Point &x, double t) { return 3.0 + 2.0 * x[0] - t + 0.5 * x[0] * t; };
  const ScalarField s = sample(f, g);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ux(-1.0, 1.0), ut(0.0, 1.0);
  for (int i = 0; i < 200; ++i)
  {
    const Point x(ux(rng), 0.0);
    const double t = ut(rng);
    CHECK(interpolate(s, x, t) == doctest::Approx(f(x, t)).epsilon(1e-12));
  }
  const SpaceTimeFunction fn = as_function(s);
  CHECK(fn(Point(0.3, 0.0), 0.7) == doctest::Approx(f(Point(0.3, 0.0), 0.7)));
}

TEST_CASE("truncation, padding and restriction")
{
  const Grid g = Grid::interval_span(0.0, 1.0, 4, 1.0, 2.0, 4);
  const ScalarField s = sample([](const Point &x, double t) { return 10.0 * x[0] * t; }, g);
  const ScalarField tr = truncate(s, 5.0);
  CHECK(tr.cap().has_value());
  CHECK(tr.max() == doctest::Approx(5.0));
  CHECK(((s.values() - tr.values()) >= 0.0).all());

  const ScalarField ext = extend_to_past(s, 0.4);
  CHECK(ext.grid().t0 <= 0.4 + 1e-12);
  CHECK(ext.grid().dt == doctest::Approx(g.dt));
  const int pad = ext.grid().steps - g.steps;
  CHECK(pad >= 3);
  CHECK((ext.values().topRows(pad) == 0.0).all());
  CHECK((ext.values().bottomRows(g.time_size()) == s.values()).all());

  const ScalarField r = restrict_time(s, 1, 3);
  CHECK(r.grid().time_size() == 3);
  CHECK(r.grid().t0 == doctest::Approx(g.time(1)));
  CHECK((r.values() == s.values().middleRows(1, 3)).all());
}

TEST_CASE("unit sphere areas")
{
  CHECK(sphere_area(1) == doctest::Approx(2.0));
  CHECK(sphere_area(2) == doctest::Approx(2.0 * std::numbers::pi));
  CHECK(sphere_area(3) == doctest::Approx(4.0 * std::numbers::pi));
  CHECK(sphere_area(4) == doctest::Approx(2.0 * std::numbers::pi * std::numbers::pi));
}

TEST_CASE("derived constants in two dimensions and the void gap")
{
  const DerivedConstants d = derived_constants(MediumParams::plaplace(3.0, 2));
  CHECK(d.lambda == doctest::Approx(5.0));
  CHECK(d.q_crit == doctest::Approx(3.5));
  CHECK(d.qgrad_crit == doctest::Approx(2.0 + 1.0 / 3.0));
  CHECK(d.class_threshold == doctest::Approx(1.0));
  const DerivedConstants d4 = derived_constants(MediumParams::plaplace(4.0, 1));
  CHECK(d4.lambda == doctest::Approx(6.0));
  CHECK(d4.q_crit == doctest::Approx(7.0));
  CHECK(d4.class_threshold == doctest::Approx(2.0));

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> up(2.01, 10.0);
  for (int s = 0; s < 200; ++s)
  {
    const double p = up(rng);
    const int n = 1 + s % 4;
    const DerivedConstants c = derived_constants(MediumParams::plaplace(p, n));
    CHECK(c.lambda == n * (p - 2) + p);
    CHECK(c.class_threshold < c.q_crit);
    const DerivedConstants e = derived_constants(MediumParams::pme(p - 1.0, n), Equation::PME);
    CHECK(e.class_threshold < e.q_crit);
  }
}

TEST_CASE("q-norm of constant and zero fields")
{
  const Grid g = Grid::interval_span(-1.0, 1.0, 16, 0.0, 1.0, 8);
  const ScalarField two = sample([](const Point &, double) { return 2.0; }, g);
  const ScalarField zero = sample([](const Point &, double) { return 0.0; }, g);
  const Cylinder unit = Cylinder::interval(-0.5, 0.5, 0.0, 1.0);
  CHECK(integrate_q_norm(two, unit, 2.0) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(integrate_q_norm(zero, unit, 0.7) == 0.0);
  CHECK_THROWS_AS(integrate_q_norm(two, Cylinder::interval(5.0, 6.0, 0.0, 1.0), 1.0), DomainError);
}

TEST_CASE("q-norm of a sampled profile matches a fine quadrature")
{
  // A source-like profile whose slice integrals are polynomial in t^{-1/2}.
  auto u = [](const Point &x, double t) {
    const double b = std::max(0.0, 1.0 - x[0] * x[0] / (12.0 * std::sqrt(t)));
    return std::pow(t, -0.25) * b * b;
  };
  // x-integral in closed form over [-1, 1]: t^{-1/4} (2 - 2/(18 sqrt t) + 2/(720 t)).
  auto slice = [](double t) { return std::pow(t, -0.25) * (2.0 - 2.0 / (18.0 * std::sqrt(t)) + 2.0 / (720.0 * t)); };
  double oracle = 0.0;
  const int panels = 2000;
  for (int k = 0; k < panels; ++k)
  {
    const double a = 0.5 + 0.5 * k / panels, b = 0.5 + 0.5 * (k + 1) / panels;
    oracle += (b - a) / 6.0 * (slice(a) + 4.0 * slice(0.5 * (a + b)) + slice(b));
  }
  const Grid g = Grid::interval_span(-2.0, 2.0, 256, 0.5, 1.0, 64);
  const double v = integrate_q_norm(sample(u, g), Cylinder::interval(-1.0, 1.0, 0.5, 1.0), 1.0);
  CHECK(std::abs(v - oracle) / oracle < 5e-3);
}

TEST_CASE("q-norm is monotone in the region")
{
  const Grid g = Grid::interval_span(-1.0, 1.0, 40, 0.0, 1.0, 20);
  const ScalarField f = sample([](const Point &x, double t) { return std::abs(std::sin(5 * x[0] + t)); }, g);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int s = 0; s < 100; ++s)
  {
    const double a = -u(rng), b = u(rng), t1 = 0.5 * u(rng), t2 = 0.5 + 0.5 * u(rng);
    const Cylinder outer = Cylinder::interval(a, b, t1, t2);
    const Cylinder inner = Cylinder::interval(a + 0.3 * (b - a) * u(rng), b - 0.3 * (b - a) * u(rng),
                                              t1 + 0.3 * (t2 - t1) * u(rng), t2 - 0.3 * (t2 - t1) * u(rng));
    CHECK(integrate_q_norm(f, inner, 1.5) <= integrate_q_norm(f, outer, 1.5) + 1e-15);
  }
}

TEST_CASE("q-norm converges at least linearly under refinement")
{
  auto f = [](const Point &x, double) { return x[0] * x[0]; };
  const Cylinder region = Cylinder::interval(0.0, 1.0, 0.0, 1.0);
  double previous = 0.0;
  for (int cells : {8, 16, 32, 64})
  {
    const double err = std::abs(integrate_q_norm(sample(f, Grid::interval_span(0.0, 1.0, cells, 0.0, 1.0, 4)), region, 1.0) - 1.0 / 3.0);
    if (previous > 0.0)
    {
      CHECK(std::log2(previous / err) >= 1.0);
    }
    previous = err;
  }
}

TEST_CASE("truncation examples and composition")
{
  const Grid g = Grid::interval_span(0.0, 1.0, 8, 0.0, 1.0, 4);
  CHECK((truncate(sample([](const Point &, double) { return 5.0; }, g), 3.0).values() == 3.0).all());
  CHECK((truncate(sample([](const Point &, double) { return 1.0; }, g), 3.0).values() == 1.0).all());
  const ScalarField v = sample([](const Point &x, double t) { return 20.0 * x[0] * (1.0 + t); }, g);
  for (double j : {1.0, 4.0, 30.0})
  {
    for (double k : {2.0, 10.0})
    {
      CHECK((truncate(truncate(v, j), k).values() == truncate(v, std::min(j, k)).values()).all());
    }
  }
  const ScalarField plateau = truncate(v, 10.0);
  CHECK(*plateau.cap() == 10.0);
  CHECK(plateau(4, 8) == 10.0);
  CHECK(plateau(0, 1) == v(0, 1));
}

TEST_CASE("extension to the past")
{
  const Grid g = Grid::interval_span(0.0, 1.0, 8, 1.0, 2.0, 4);
  const ScalarField v = sample([](const Point &x, double t) { return x[0] + t; }, g);
  const ScalarField ext = extend_to_past(v, 0.0);
  const int pad = ext.grid().steps - g.steps;
  CHECK((restrict_time(ext, pad, ext.grid().steps).values() == v.values()).all());
  const ScalarField zero = extend_to_past(sample([](const Point &, double) { return 0.0; }, g), 0.0);
  CHECK((zero.values() == 0.0).all());
  const ScalarField neg = sample([](const Point &x, double) { return x[0] - 0.5; }, g);
  CHECK_THROWS_AS(extend_to_past(neg, 0.0), ContractError);
}
