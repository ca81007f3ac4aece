// Copyright 2026 The slowdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "slowdiff/error.hpp"

namespace slowdiff
{

// Spatial points are stored in two components; 1D and radial grids use x[0] only.
using Point = Eigen::Vector2d;

enum class Equation
{
  PLaplace,
  PME
};

const char *to_string(Equation eq);

struct MediumParams
{
  double p = 3.0;
  int n = 1;
  std::optional<double> m;

  static MediumParams plaplace(double p, int n = 1);
  static MediumParams pme(double m, int n = 1);

  // Throws ParameterError unless the branch selected by `eq` is admissible:
  // p > 2 (p-Laplace), m > 1 (PME), n >= 1.
  void validate(Equation eq) const;
};

struct DerivedConstants
{
  double lambda;           // intrinsic space-time scaling: n(p-2)+p, PME n(m-1)+2
  double q_crit;           // p-1+p/n, PME m+2/n
  double qgrad_crit;       // p-1+1/(n+1), PME 1+1/(1+nm)
  double class_threshold;  // p-2, PME m-1
  double decay_exponent;   // 1/(p-2), PME 1/(m-1)
};

DerivedConstants derived_constants(const MediumParams &params,
                                   Equation eq = Equation::PLaplace);

enum class GridKind
{
  Interval,
  Radial,
  Box2D
};

// Uniform space-time grid. Spatial node i along an axis sits at origin + i*h and
// time slice k at t0 + k*dt, k = 0..steps.
struct Grid
{
  GridKind kind = GridKind::Interval;
  Point origin = Point::Zero();
  double h = 1.0;
  std::array<int, 2> counts{2, 1};
  double t0 = 0.0;
  double dt = 1.0;
  int steps = 0;
  int radial_dim = 1;  // ambient dimension carried by radial grids

  static Grid interval(double x0, double h, int nodes, double t0 = 0.0, double dt = 1.0,
                       int steps = 0);
  // Interval with `cells` uniform cells covering [a, b].
  static Grid interval_span(double a, double b, int cells, double t0 = 0.0,
                            double t1 = 1.0, int steps = 0);
  static Grid radial(double h, int nodes, int ambient_dim, double t0 = 0.0,
                     double dt = 1.0, int steps = 0);
  static Grid box2d(const Point &origin, double h, int nx, int ny, double t0 = 0.0,
                    double dt = 1.0, int steps = 0);

  void validate() const;

  int spatial_dims() const { return kind == GridKind::Box2D ? 2 : 1; }
  int space_size() const { return counts[0] * counts[1]; }
  int time_size() const { return steps + 1; }
  double coord(int axis, int i) const { return origin[axis] + i * h; }
  double time(int k) const { return t0 + k * dt; }
  double t_end() const { return time(steps); }
  Point node(int flat) const;
  int flat_index(int ix, int iy = 0) const { return ix + counts[0] * iy; }

  // Same spatial layout, different time axis.
  Grid with_time(double t0, double dt, int steps) const;
  Grid spatial() const { return with_time(0.0, 1.0, 0); }
};

// Space-time box: spatial half-widths around `center`, time interval (t1, t2).
struct Cylinder
{
  Point center = Point::Zero();
  Point half = Point::Ones();
  double t1 = 0.0;
  double t2 = 1.0;

  static Cylinder interval(double a, double b, double t1, double t2);

  Point lower() const { return center - half; }
  Point upper() const { return center + half; }
  bool contains(const Point &x, double t, int dims) const;
  bool contains(const Cylinder &other, int dims) const;
};

// The spatial and temporal extent covered by the node cells of a grid.
Cylinder grid_extent(const Grid &grid);

// Decomposes outer \ inner into disjoint boxes (at most 2*(dims+1)).
std::vector<Cylinder> box_difference(const Cylinder &outer, const Cylinder &inner,
                                     int dims);

// Sampled space-time function. values(k, i): time slice k, flat spatial node i. A set
// cap marks values equal to it as "truncated at cap" rather than finite data.
class ScalarField
{
public:
  ScalarField(Grid grid, Eigen::ArrayXXd values, std::optional<double> cap = {});

  const Grid &grid() const { return grid_; }
  const Eigen::ArrayXXd &values() const { return values_; }
  std::optional<double> cap() const { return cap_; }

  double operator()(int k, int i) const { return values_(k, i); }
  Eigen::ArrayXd slice(int k) const { return values_.row(k).transpose(); }

  double max() const { return values_.maxCoeff(); }
  double min() const { return values_.minCoeff(); }

private:
  Grid grid_;
  Eigen::ArrayXXd values_;
  std::optional<double> cap_;
};

using SpaceTimeFunction = std::function<double(const Point &, double)>;

ScalarField sample(const SpaceTimeFunction &fn, const Grid &grid);

// Piecewise (multi)linear interpolation in space and time; clamps to the grid.
double interpolate(const ScalarField &field, const Point &x, double t);
SpaceTimeFunction as_function(ScalarField field);

// Tensor midpoint rule: each node owns its cell [x - h/2, x + h/2] (radial cells carry
// the r^{n-1} surface weight); the cell measure is clipped to the region.
double integrate_q_norm(const ScalarField &field, const Cylinder &region, double q);

ScalarField truncate(const ScalarField &field, double j);

// Pads zero slices in front so the grid starts at or before new_t0 on the original
// time lattice.
ScalarField extend_to_past(const ScalarField &field, double new_t0);

// Keeps slices [k_begin, k_end] (inclusive).
ScalarField restrict_time(const ScalarField &field, int k_begin, int k_end);

// Surface area of the unit sphere in R^n (2 for n = 1).
double sphere_area(int n);

}  // namespace slowdiff
