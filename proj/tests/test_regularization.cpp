// Copyright 2026 The slowdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstring>
#include <random>

#include <doctest.h>

#include "slowdiff/regularization.hpp"

using namespace slowdiff;

namespace
{

ScalarField random_field(std::mt19937_64 &rng, int cells, int steps)
{
  const Grid g = Grid::interval_span(-1.0, 1.0, cells, 0.0, 1.0, steps);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::ArrayXXd v(g.time_size(), g.space_size());
  for (int k = 0; k < v.rows(); ++k)
  {
    for (int i = 0; i < v.cols(); ++i)
    {
      v(k, i) = u(rng);
    }
  }
  return ScalarField(g, v);
}

InfConvSpec over(const ScalarField &f, double eps)
{
  return {eps, grid_extent(f.grid())};
}

bool identical(const ScalarField &a, const ScalarField &b)
{
  return a.values().size() == b.values().size() &&
         std::memcmp(a.values().data(), b.values().data(), sizeof(double) * a.values().size()) == 0;
}

}  // namespace

TEST_CASE("constant fields are fixed points")
{
  const Grid g = Grid::interval_span(-1.0, 1.0, 16, 0.0, 1.0, 8);
  const ScalarField c = sample([](const Point &, double) { return 2.5; }, g);
  for (InfConvMethod m : {InfConvMethod::BruteForce, InfConvMethod::LowerEnvelope})
  {
    CHECK((inf_convolve(c, over(c, 0.1), m).values() == 2.5).all());
  }
}

TEST_CASE("absolute value keeps its minimum")
{
  const Grid g = Grid::interval_span(-1.0, 1.0, 20, 0.0, 1.0, 2);
  const ScalarField v = sample([](const Point &x, double) { return std::abs(x[0]); }, g);
  const ScalarField r = inf_convolve(v, over(v, 0.2));
  CHECK(r(1, 10) == 0.0);
}

TEST_CASE("linear field shifts by half the squared slope")
{
  // For v = a x the infimum sits at y = x - eps a, giving a x - eps a^2 / 2.
  const double h = 0.01, eps = 0.1;
  const Grid g = Grid::interval(0.0, h, 101, 0.0, 0.1, 3);
  const ScalarField v = sample([](const Point &x, double) { return x[0]; }, g);
  const ScalarField r = inf_convolve(v, over(v, eps));
  for (int i = 10; i < 101; ++i)
  {
    CHECK(r(1, i) == doctest::Approx(g.coord(0, i) - 0.5 * eps).epsilon(1e-12));
  }
}

TEST_CASE("regularization lies below the field")
{
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial)
  {
    const ScalarField v = random_field(rng, 24, 6);
    const ScalarField r = inf_convolve(v, over(v, 0.05));
    CHECK((r.values() <= v.values()).all());
  }
}

TEST_CASE("regularization is monotone in epsilon")
{
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> ue(0.001, 0.5);
  for (int trial = 0; trial < 1000; ++trial)
  {
    const ScalarField v = random_field(rng, 8, 3);
    double e1 = ue(rng), e2 = ue(rng);
    if (e1 > e2)
    {
      std::swap(e1, e2);
    }
    const ScalarField r1 = inf_convolve(v, over(v, e1), InfConvMethod::LowerEnvelope);
    const ScalarField r2 = inf_convolve(v, over(v, e2), InfConvMethod::LowerEnvelope);
    CHECK((r1.values() >= r2.values()).all());
  }
}

TEST_CASE("regularization converges to continuous fields")
{
  const Grid g = Grid::interval_span(-1.0, 1.0, 64, 0.0, 1.0, 16);
  const ScalarField v = sample([](const Point &x, double t) { return std::sin(3 * x[0]) * std::cos(2 * t) + 1.0; }, g);
  double previous = INFINITY;
  for (double eps : {0.2, 0.1, 0.05, 0.025, 0.0125})
  {
    const double err = (inf_convolve(v, over(v, eps)).values() - v.values()).abs().maxCoeff();
    CHECK(err < previous);
    previous = err;
  }
}

TEST_CASE("regularization is Lipschitz with the oscillation bound")
{
  std::mt19937_64 rng(23);
  const ScalarField v = random_field(rng, 64, 4);
  const double osc = v.max() - v.min(), h = v.grid().h;
  for (double eps : {0.05, 0.2})
  {
    const ScalarField r = inf_convolve(v, over(v, eps));
    double lip = 0.0;
    for (int k = 0; k < r.grid().time_size(); ++k)
    {
      for (int i = 0; i + 1 < r.grid().space_size(); ++i)
      {
        lip = std::max(lip, std::abs(r(k, i + 1) - r(k, i)) / h);
      }
    }
    CHECK(lip <= 2.0 * (std::sqrt(2.0 * osc / eps) + h / eps));
  }
}

TEST_CASE("lower envelope matches brute force bit for bit")
{
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 20; ++trial)
  {
    const ScalarField v = random_field(rng, 16 + trial, 3 + trial % 4);
    const InfConvSpec s = over(v, 0.01 + 0.02 * trial);
    CHECK(identical(inf_convolve(v, s, InfConvMethod::BruteForce), inf_convolve(v, s, InfConvMethod::LowerEnvelope)));
  }
  const Grid b = Grid::box2d(Point(-1.0, -1.0), 0.125, 17, 17, 0.0, 0.25, 4);
  const ScalarField w = sample([](const Point &x, double t) { return std::abs(x[0] - x[1]) + t * x[0] * x[0]; }, b);
  const InfConvSpec s = over(w, 0.07);
  CHECK(identical(inf_convolve(w, s, InfConvMethod::BruteForce), inf_convolve(w, s, InfConvMethod::LowerEnvelope)));
}

TEST_CASE("restricted domain and invalid specs")
{
  const Grid g = Grid::interval_span(-1.0, 1.0, 20, 0.0, 1.0, 4);
  const ScalarField v = sample([](const Point &x, double) { return x[0] * x[0]; }, g);
  const ScalarField r = inf_convolve(v, {0.1, Cylinder::interval(0.0, 1.0, 0.0, 1.0)});
  CHECK(r.grid().space_size() == 11);
  CHECK(r.grid().origin[0] == doctest::Approx(0.0));
  CHECK_THROWS_AS(inf_convolve(v, {0.1, Cylinder::interval(5.0, 6.0, 0.0, 1.0)}), DomainError);
  CHECK_THROWS(inf_convolve(v, {0.0, grid_extent(g)}));
}
