// Copyright 2026 The slowdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "slowdiff/exact_solutions.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "slowdiff/quadrature.hpp"

namespace slowdiff
{

void BarenblattSpec::validate() const
{
  params.validate(Equation::PLaplace);
  if (!(C > 0.0) || !std::isfinite(C))
  {
    throw ParameterError("Barenblatt constant C must be positive");
  }
}

double barenblatt_distance(const BarenblattSpec &spec, const Point &x)
{
  if (spec.params.n == 2)
  {
    return (x - spec.x0).norm();
  }
  return std::abs(x[0] - spec.x0[0]);
}

double barenblatt_eval(const BarenblattSpec &spec, const Point &x, double t)
{
  return barenblatt_profile(spec.params.p, spec.params.n, spec.C, barenblatt_distance(spec, x),
                            t - spec.t0);
}

double barenblatt_gradient_norm(const BarenblattSpec &spec, const Point &x, double t)
{
  return -barenblatt_radial_derivative(spec.params.p, spec.params.n, spec.C,
                                       barenblatt_distance(spec, x), t - spec.t0);
}

Point barenblatt_gradient(const BarenblattSpec &spec, const Point &x, double t)
{
  const double r = barenblatt_distance(spec, x);
  if (!(r > 0.0))
  {
    return Point::Zero();
  }
  const double dr =
      barenblatt_radial_derivative(spec.params.p, spec.params.n, spec.C, r, t - spec.t0);
  Point dir = x - spec.x0;
  if (spec.params.n != 2)
  {
    dir[1] = 0.0;
  }
  return dr * dir / r;
}

double barenblatt_support_radius(const BarenblattSpec &spec, double t)
{
  const double tau = t - spec.t0;
  if (!(tau > 0.0))
  {
    return 0.0;
  }
  const double p = spec.params.p;
  const double lambda = derived_constants(spec.params).lambda;
  const double k = barenblatt_k(p, spec.params.n);
  return std::pow(spec.C / k, (p - 1.0) / p) * std::pow(tau, 1.0 / lambda);
}

double barenblatt_mass(const BarenblattSpec &spec, double t)
{
  spec.validate();
  const double tau = t - spec.t0;
  if (!(tau > 0.0))
  {
    throw DomainError("Barenblatt mass needs t > t0");
  }
  const double p = spec.params.p;
  const int n = spec.params.n;
  const double R = barenblatt_support_radius(spec, t);
  auto density = [&](double r) {
    return sphere_area(n) * std::pow(r, n - 1) * barenblatt_profile(p, n, spec.C, r, tau);
  };
  static const quad::GaussLegendre<double> rule(20);
  const double mid = 0.5 * R;
  // Both ends carry power-type singularities: the cusp at r = 0 and the front at r = R.
  const double inner = quad::graded_toward_right(
      [&](double, double gap) { return density(gap); }, 0.0, mid, 50, rule);
  const double outer = quad::graded_toward_right(
      [&](double, double gap) { return density(R - gap); }, mid, R, 50, rule);
  return inner + outer;
}

SpaceTimeFunction barenblatt_function(const BarenblattSpec &spec)
{
  spec.validate();
  return [spec](const Point &x, double t) { return barenblatt_eval(spec, x, t); };
}

SingularSet barenblatt_front(const BarenblattSpec &spec)
{
  spec.validate();
  return SingularSet::surface([spec](const Point &x, double t) {
    return std::abs(barenblatt_distance(spec, x) - barenblatt_support_radius(spec, t));
  });
}

double separable_eval(const SeparableSpec &spec, const Point &x, double t)
{
  const double u = spec.eigen.value_at(x);
  if (!(t > spec.t0))
  {
    return 0.0;
  }
  return u / std::pow(t - spec.t0, spec.eigen.decay_exponent());
}

SpaceTimeFunction separable_function(const SeparableSpec &spec)
{
  auto shared = std::make_shared<const SeparableSpec>(spec);
  return [shared](const Point &x, double t) { return separable_eval(*shared, x, t); };
}

double ResidualReport::sup() const
{
  double s = 0.0;
  for (int k = 0; k < excluded.rows(); ++k)
  {
    for (int i = 0; i < excluded.cols(); ++i)
    {
      if (!excluded(k, i))
      {
        s = std::max(s, std::abs(residual(k, i)));
      }
    }
  }
  return s;
}

double ResidualReport::sup(const Cylinder &window) const
{
  const Grid &g = residual.grid();
  double s = 0.0;
  for (int k = 0; k < excluded.rows(); ++k)
  {
    for (int i = 0; i < excluded.cols(); ++i)
    {
      if (!excluded(k, i) && window.contains(g.node(i), g.time(k), g.spatial_dims()))
      {
        s = std::max(s, std::abs(residual(k, i)));
      }
    }
  }
  return s;
}

int ResidualReport::active_nodes() const
{
  return static_cast<int>((excluded == 0).count());
}

namespace
{

bool near_singular(const SingularSet &s, const Point &x, double t, const Grid &g, double radius)
{
  const int dims = g.spatial_dims();
  const double dx = dims == 2 ? (x - s.x).norm() : std::abs(x[0] - s.x[0]);
  switch (s.kind)
  {
  case SingularKind::None:
    return false;
  case SingularKind::SpaceTimePoint:
  {
    const double a = dx / g.h, b = (t - s.t) / g.dt;
    return a * a + b * b <= radius * radius;
  }
  case SingularKind::SpatialPoint:
    return dx <= radius * g.h;
  case SingularKind::TimeSlice:
    return std::abs(t - s.t) <= radius * g.dt;
  case SingularKind::Surface:
    return s.distance && s.distance(x, t) <= radius * g.h;
  }
  return false;
}

}  // namespace

ResidualReport pde_residual(const ScalarField &field, const MediumParams &params, Equation eq,
                            const SingularSet &singular, double exclusion_radius)
{
  params.validate(eq);
  const Grid &g = field.grid();
  const auto &v = field.values();
  const int nt = g.time_size();
  const int nx = g.counts[0], ny = g.counts[1];
  const bool box = g.kind == GridKind::Box2D;
  const bool radial = g.kind == GridKind::Radial;
  const double h = g.h;
  const double p = params.p;
  const double m = eq == Equation::PME ? *params.m : 1.0;

  Eigen::ArrayXXd res = Eigen::ArrayXXd::Zero(nt, g.space_size());
  Eigen::ArrayXXi excluded = Eigen::ArrayXXi::Ones(nt, g.space_size());

  auto potential = [&](int k, int i) {
    return eq == Equation::PME ? std::pow(std::max(v(k, i), 0.0), m) : v(k, i);
  };
  auto flux = [&](double d, double grad_sq) {
    if (eq == Equation::PME)
    {
      return d;
    }
    return grad_sq > 0.0 ? std::pow(grad_sq, 0.5 * (p - 2.0)) * d : 0.0;
  };

  for (int k = 1; k + 1 < nt; ++k)
  {
    for (int j = box ? 1 : 0; j < (box ? ny - 1 : 1); ++j)
    {
      for (int i = 1; i + 1 < nx; ++i)
      {
        const int c = g.flat_index(i, j);
        const Point x = g.node(c);
        const double t = g.time(k);
        if (near_singular(singular, x, t, g, exclusion_radius))
        {
          continue;
        }
        const double ut = (v(k + 1, c) - v(k - 1, c)) / (2.0 * g.dt);
        double div = 0.0;
        if (!box)
        {
          const double dp = (potential(k, c + 1) - potential(k, c)) / h;
          const double dm = (potential(k, c) - potential(k, c - 1)) / h;
          const double fp = flux(dp, dp * dp), fm = flux(dm, dm * dm);
          if (radial)
          {
            const int n = g.radial_dim;
            const double r = x[0];
            const double wp = std::pow(r + 0.5 * h, n - 1), wm = std::pow(r - 0.5 * h, n - 1);
            div = (wp * fp - wm * fm) / (h * std::pow(r, n - 1));
          }
          else
          {
            div = (fp - fm) / h;
          }
        }
        else
        {
          auto P = [&](int ix, int iy) { return potential(k, g.flat_index(ix, iy)); };
          // x-faces
          const double dxp = (P(i + 1, j) - P(i, j)) / h;
          const double dxm = (P(i, j) - P(i - 1, j)) / h;
          const double tyx_p = (P(i, j + 1) - P(i, j - 1) + P(i + 1, j + 1) - P(i + 1, j - 1)) / (4.0 * h);
          const double tyx_m = (P(i, j + 1) - P(i, j - 1) + P(i - 1, j + 1) - P(i - 1, j - 1)) / (4.0 * h);
          // y-faces
          const double dyp = (P(i, j + 1) - P(i, j)) / h;
          const double dym = (P(i, j) - P(i, j - 1)) / h;
          const double txy_p = (P(i + 1, j) - P(i - 1, j) + P(i + 1, j + 1) - P(i - 1, j + 1)) / (4.0 * h);
          const double txy_m = (P(i + 1, j) - P(i - 1, j) + P(i + 1, j - 1) - P(i - 1, j - 1)) / (4.0 * h);
          div = (flux(dxp, dxp * dxp + tyx_p * tyx_p) - flux(dxm, dxm * dxm + tyx_m * tyx_m) +
                 flux(dyp, dyp * dyp + txy_p * txy_p) - flux(dym, dym * dym + txy_m * txy_m)) /
                h;
        }
        res(k, c) = ut - div;
        excluded(k, c) = 0;
      }
    }
  }
  return {ScalarField(g, std::move(res)), std::move(excluded)};
}

ResidualReport pde_residual(const SpaceTimeFunction &u, const Grid &stencil,
                            const MediumParams &params, Equation eq,
                            const SingularSet &singular, double exclusion_radius)
{
  return pde_residual(sample(u, stencil), params, eq, singular, exclusion_radius);
}

}  // namespace slowdiff
