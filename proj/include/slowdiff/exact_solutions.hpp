// Copyright 2026 The slowdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <functional>
#include <optional>

#include "slowdiff/core.hpp"
#include "slowdiff/eigenfunctions.hpp"

namespace slowdiff
{

// Barenblatt source solution of the p-Laplace equation, centered at (x0, t0).
struct BarenblattSpec
{
  MediumParams params;
  double C = 1.0;
  Point x0 = Point::Zero();
  double t0 = 0.0;

  void validate() const;
};

// Profile constant k = ((p-2)/p) lambda^{1/(1-p)}.
template <typename Scalar>
Scalar barenblatt_k(Scalar p, int n)
{
  const Scalar lambda = n * (p - 2) + p;
  return (p - 2) / p * std::pow(lambda, Scalar(1) / (1 - p));
}

// t^{-n/lambda} [C - k (r/t^{1/lambda})^{p/(p-1)}]_+^{(p-1)/(p-2)}, zero for t <= 0.
template <typename Scalar>
Scalar barenblatt_profile(Scalar p, int n, Scalar C, Scalar r, Scalar t)
{
  if (!(t > 0))
  {
    return Scalar(0);
  }
  const Scalar lambda = n * (p - 2) + p;
  const Scalar rho = r / std::pow(t, 1 / lambda);
  const Scalar bracket = C - barenblatt_k(p, n) * std::pow(rho, p / (p - 1));
  if (!(bracket > 0))
  {
    return Scalar(0);
  }
  return std::pow(t, -n / lambda) * std::pow(bracket, (p - 1) / (p - 2));
}

// Radial derivative d/dr of the profile (non-positive).
template <typename Scalar>
Scalar barenblatt_radial_derivative(Scalar p, int n, Scalar C, Scalar r, Scalar t)
{
  if (!(t > 0) || !(r > 0))
  {
    return Scalar(0);
  }
  const Scalar lambda = n * (p - 2) + p;
  const Scalar k = barenblatt_k(p, n);
  const Scalar rho = r / std::pow(t, 1 / lambda);
  const Scalar bracket = C - k * std::pow(rho, p / (p - 1));
  if (!(bracket > 0))
  {
    return Scalar(0);
  }
  return -std::pow(t, -(n + 1) / lambda) * (p / (p - 2)) * k *
         std::pow(bracket, 1 / (p - 2)) * std::pow(rho, 1 / (p - 1));
}

// Distance to the center as seen by an n-dimensional solution: |x - x0| on boxes,
// |x[0] - x0[0]| on intervals and radial grids.
double barenblatt_distance(const BarenblattSpec &spec, const Point &x);

double barenblatt_eval(const BarenblattSpec &spec, const Point &x, double t);
// Euclidean norm of the spatial gradient.
double barenblatt_gradient_norm(const BarenblattSpec &spec, const Point &x, double t);
Point barenblatt_gradient(const BarenblattSpec &spec, const Point &x, double t);
double barenblatt_support_radius(const BarenblattSpec &spec, double t);
// Total mass over R^n; DomainError for t <= t0.
double barenblatt_mass(const BarenblattSpec &spec, double t);
SpaceTimeFunction barenblatt_function(const BarenblattSpec &spec);

// Separable solution U(x) / (t - t0)^{1/(p-2)} for t > t0, zero otherwise.
struct SeparableSpec
{
  EigenResult eigen;
  double t0 = 0.0;
};

double separable_eval(const SeparableSpec &spec, const Point &x, double t);
SpaceTimeFunction separable_function(const SeparableSpec &spec);

enum class SingularKind
{
  None,
  SpaceTimePoint,  // e.g. the Barenblatt source (x0, t0)
  SpatialPoint,    // a spatial point for all times
  TimeSlice,       // the slice t = t0
  Surface          // zero set of a spatial distance function, e.g. a free boundary
};

struct SingularSet
{
  SingularKind kind = SingularKind::None;
  Point x = Point::Zero();
  double t = 0.0;
  std::function<double(const Point &, double)> distance;  // Surface only

  static SingularSet none() { return {}; }
  static SingularSet space_time_point(const Point &x, double t) { return {SingularKind::SpaceTimePoint, x, t, {}}; }
  static SingularSet spatial_point(const Point &x) { return {SingularKind::SpatialPoint, x, 0.0, {}}; }
  static SingularSet time_slice(double t) { return {SingularKind::TimeSlice, Point::Zero(), t, {}}; }
  static SingularSet surface(std::function<double(const Point &, double)> d)
  {
    return {SingularKind::Surface, Point::Zero(), 0.0, std::move(d)};
  }
};

// The moving front |x - x0| = R(t), where the profile stops being twice differentiable.
SingularSet barenblatt_front(const BarenblattSpec &spec);

struct ResidualReport
{
  ScalarField residual;     // zero at excluded nodes
  Eigen::ArrayXXi excluded; // 1 where the stencil leaves the grid or meets the singular set

  double sup() const;
  // Sup over non-excluded nodes inside the window.
  double sup(const Cylinder &window) const;
  int active_nodes() const;
};

// Strong-form residual u_t - div(|grad u|^{p-2} grad u) (PME: u_t - Lap(u^m)) with centered
// time differences and half-node fluxes. Nodes within exclusion_radius*h (and *dt for
// time offsets) of the singular set are excluded.
ResidualReport pde_residual(const ScalarField &field, const MediumParams &params, Equation eq,
                            const SingularSet &singular = {}, double exclusion_radius = 4.0);
ResidualReport pde_residual(const SpaceTimeFunction &u, const Grid &stencil,
                            const MediumParams &params, Equation eq,
                            const SingularSet &singular = {}, double exclusion_radius = 4.0);

}  // namespace slowdiff
