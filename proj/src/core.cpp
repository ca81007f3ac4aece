// Copyright 2026 The slowdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "slowdiff/core.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>

namespace slowdiff
{

const char *to_string(Equation eq)
{
  return eq == Equation::PLaplace ? "plaplace" : "pme";
}

MediumParams MediumParams::plaplace(double p, int n)
{
  MediumParams params;
  params.p = p;
  params.n = n;
  params.validate(Equation::PLaplace);
  return params;
}

MediumParams MediumParams::pme(double m, int n)
{
  MediumParams params;
  params.m = m;
  params.n = n;
  params.validate(Equation::PME);
  return params;
}

void MediumParams::validate(Equation eq) const
{
  if (n < 1)
  {
    throw ParameterError("dimension n must be >= 1, got " + std::to_string(n));
  }
  if (eq == Equation::PLaplace)
  {
    if (!(p > 2.0) || !std::isfinite(p))
    {
      throw ParameterError("slow diffusion requires p > 2, got " + std::to_string(p));
    }
  }
  else
  {
    if (!m || !(*m > 1.0) || !std::isfinite(*m))
    {
      throw ParameterError("porous medium branch requires m > 1");
    }
  }
}

DerivedConstants derived_constants(const MediumParams &params, Equation eq)
{
  params.validate(eq);
  const double n = params.n;
  DerivedConstants c{};
  if (eq == Equation::PLaplace)
  {
    const double p = params.p;
    c.lambda = n * (p - 2.0) + p;
    c.q_crit = p - 1.0 + p / n;
    c.qgrad_crit = p - 1.0 + 1.0 / (n + 1.0);
    c.class_threshold = p - 2.0;
    c.decay_exponent = 1.0 / (p - 2.0);
  }
  else
  {
    const double m = *params.m;
    c.lambda = n * (m - 1.0) + 2.0;
    c.q_crit = m + 2.0 / n;
    c.qgrad_crit = 1.0 + 1.0 / (1.0 + n * m);
    c.class_threshold = m - 1.0;
    c.decay_exponent = 1.0 / (m - 1.0);
  }
  return c;
}

Grid Grid::interval(double x0, double h, int nodes, double t0, double dt, int steps)
{
  Grid g;
  g.kind = GridKind::Interval;
  g.origin = Point(x0, 0.0);
  g.h = h;
  g.counts = {nodes, 1};
  g.t0 = t0;
  g.dt = dt;
  g.steps = steps;
  g.validate();
  return g;
}

Grid Grid::interval_span(double a, double b, int cells, double t0, double t1, int steps)
{
  if (cells < 1 || !(b > a))
  {
    throw DomainError("interval_span needs b > a and at least one cell");
  }
  const double dt = steps > 0 ? (t1 - t0) / steps : 1.0;
  return interval(a, (b - a) / cells, cells + 1, t0, dt, steps);
}

Grid Grid::radial(double h, int nodes, int ambient_dim, double t0, double dt, int steps)
{
  Grid g = interval(0.0, h, nodes, t0, dt, steps);
  g.kind = GridKind::Radial;
  if (ambient_dim < 1)
  {
    throw ParameterError("radial grid needs ambient dimension >= 1");
  }
  g.radial_dim = ambient_dim;
  return g;
}

Grid Grid::box2d(const Point &origin, double h, int nx, int ny, double t0, double dt,
                 int steps)
{
  Grid g;
  g.kind = GridKind::Box2D;
  g.origin = origin;
  g.h = h;
  g.counts = {nx, ny};
  g.t0 = t0;
  g.dt = dt;
  g.steps = steps;
  g.validate();
  return g;
}

void Grid::validate() const
{
  if (!(h > 0.0) || !(dt > 0.0))
  {
    throw DomainError("grid steps must be positive");
  }
  if (counts[0] < 2 || (kind == GridKind::Box2D ? counts[1] < 2 : counts[1] != 1))
  {
    throw DomainError("grid needs at least two nodes per spatial axis");
  }
  if (steps < 0)
  {
    throw DomainError("negative number of time steps");
  }
}

Point Grid::node(int flat) const
{
  const int ix = flat % counts[0];
  const int iy = flat / counts[0];
  return Point(coord(0, ix), kind == GridKind::Box2D ? coord(1, iy) : 0.0);
}

Grid Grid::with_time(double new_t0, double new_dt, int new_steps) const
{
  Grid g = *this;
  g.t0 = new_t0;
  g.dt = new_dt;
  g.steps = new_steps;
  g.validate();
  return g;
}

Cylinder Cylinder::interval(double a, double b, double t1, double t2)
{
  Cylinder c;
  c.center = Point(0.5 * (a + b), 0.0);
  c.half = Point(0.5 * (b - a), 0.0);
  c.t1 = t1;
  c.t2 = t2;
  return c;
}

bool Cylinder::contains(const Point &x, double t, int dims) const
{
  for (int a = 0; a < dims; ++a)
  {
    if (std::abs(x[a] - center[a]) > half[a])
    {
      return false;
    }
  }
  return t >= t1 && t <= t2;
}

bool Cylinder::contains(const Cylinder &other, int dims) const
{
  for (int a = 0; a < dims; ++a)
  {
    if (other.center[a] - other.half[a] < center[a] - half[a] ||
        other.center[a] + other.half[a] > center[a] + half[a])
    {
      return false;
    }
  }
  return other.t1 >= t1 && other.t2 <= t2;
}

Cylinder grid_extent(const Grid &grid)
{
  Cylinder c;
  for (int a = 0; a < grid.spatial_dims(); ++a)
  {
    double lo = grid.origin[a] - 0.5 * grid.h;
    const double hi = grid.coord(a, grid.counts[a] - 1) + 0.5 * grid.h;
    if (grid.kind == GridKind::Radial)
    {
      lo = std::max(lo, 0.0);
    }
    c.center[a] = 0.5 * (lo + hi);
    c.half[a] = 0.5 * (hi - lo);
  }
  if (grid.spatial_dims() == 1)
  {
    c.center[1] = 0.0;
    c.half[1] = 0.0;
  }
  c.t1 = grid.t0 - 0.5 * grid.dt;
  c.t2 = grid.t_end() + 0.5 * grid.dt;
  return c;
}

std::vector<Cylinder> box_difference(const Cylinder &outer, const Cylinder &inner, int dims)
{
  // Axes 0..dims-1 are spatial, axis `dims` is time.
  const int axes = dims + 1;
  std::array<double, 3> olo{}, ohi{}, ilo{}, ihi{};
  for (int a = 0; a < dims; ++a)
  {
    olo[a] = outer.center[a] - outer.half[a];
    ohi[a] = outer.center[a] + outer.half[a];
    ilo[a] = std::max(olo[a], inner.center[a] - inner.half[a]);
    ihi[a] = std::min(ohi[a], inner.center[a] + inner.half[a]);
  }
  olo[dims] = outer.t1;
  ohi[dims] = outer.t2;
  ilo[dims] = std::max(outer.t1, inner.t1);
  ihi[dims] = std::min(outer.t2, inner.t2);

  for (int a = 0; a < axes; ++a)
  {
    if (!(ilo[a] < ihi[a]))
    {
      return {outer};
    }
  }

  auto make = [&](const std::array<double, 3> &lo, const std::array<double, 3> &hi) {
    Cylinder c = outer;
    for (int a = 0; a < dims; ++a)
    {
      c.center[a] = 0.5 * (lo[a] + hi[a]);
      c.half[a] = 0.5 * (hi[a] - lo[a]);
    }
    c.t1 = lo[dims];
    c.t2 = hi[dims];
    return c;
  };

  std::vector<Cylinder> pieces;
  std::array<double, 3> rlo = olo, rhi = ohi;
  for (int a = 0; a < axes; ++a)
  {
    if (rlo[a] < ilo[a])
    {
      auto hi = rhi;
      hi[a] = ilo[a];
      pieces.push_back(make(rlo, hi));
      rlo[a] = ilo[a];
    }
    if (ihi[a] < rhi[a])
    {
      auto lo = rlo;
      lo[a] = ihi[a];
      pieces.push_back(make(lo, rhi));
      rhi[a] = ihi[a];
    }
  }
  return pieces;
}

ScalarField::ScalarField(Grid grid, Eigen::ArrayXXd values, std::optional<double> cap)
  : grid_(std::move(grid)), values_(std::move(values)), cap_(cap)
{
  grid_.validate();
  if (values_.rows() != grid_.time_size() || values_.cols() != grid_.space_size())
  {
    throw ContractError("field values do not match grid extents");
  }
  if (cap_ && values_.size() > 0 && values_.maxCoeff() > *cap_)
  {
    throw ContractError("field exceeds its cap marker");
  }
}

ScalarField sample(const SpaceTimeFunction &fn, const Grid &grid)
{
  Eigen::ArrayXXd values(grid.time_size(), grid.space_size());
  for (int k = 0; k < grid.time_size(); ++k)
  {
    const double t = grid.time(k);
    for (int i = 0; i < grid.space_size(); ++i)
    {
      values(k, i) = fn(grid.node(i), t);
    }
  }
  return ScalarField(grid, std::move(values));
}

namespace
{

struct Bracket
{
  int i;
  double w;  // weight of node i+1
};

Bracket locate(double x, double origin, double h, int nodes)
{
  if (nodes < 2)
  {
    return {0, 0.0};
  }
  const double s = (x - origin) / h;
  int i = static_cast<int>(std::floor(s));
  i = std::clamp(i, 0, nodes - 2);
  const double w = std::clamp(s - i, 0.0, 1.0);
  return {i, w};
}

// Measure of [x - h/2, x + h/2] clipped to [lo, hi]; radial cells carry the
// surface weight of R^n.
double cell_measure(double x, double h, double lo, double hi, bool radial, int n)
{
  double a = std::max(lo, x - 0.5 * h);
  double b = std::min(hi, x + 0.5 * h);
  if (radial)
  {
    a = std::max(a, 0.0);
  }
  if (!(b > a))
  {
    return 0.0;
  }
  if (!radial)
  {
    return b - a;
  }
  return sphere_area(n) / n * (std::pow(b, n) - std::pow(a, n));
}

}  // namespace

double interpolate(const ScalarField &field, const Point &x, double t)
{
  const Grid &g = field.grid();
  const auto &v = field.values();
  const Bracket bt = locate(t, g.t0, g.dt, g.time_size());
  const Bracket bx = locate(x[0], g.origin[0], g.h, g.counts[0]);
  auto spatial = [&](int k) {
    if (g.kind != GridKind::Box2D)
    {
      return (1.0 - bx.w) * v(k, bx.i) + bx.w * v(k, bx.i + 1);
    }
    const Bracket by = locate(x[1], g.origin[1], g.h, g.counts[1]);
    auto at = [&](int ix, int iy) { return v(k, g.flat_index(ix, iy)); };
    return (1.0 - by.w) * ((1.0 - bx.w) * at(bx.i, by.i) + bx.w * at(bx.i + 1, by.i)) +
           by.w * ((1.0 - bx.w) * at(bx.i, by.i + 1) + bx.w * at(bx.i + 1, by.i + 1));
  };
  if (g.time_size() < 2)
  {
    return spatial(0);
  }
  return (1.0 - bt.w) * spatial(bt.i) + bt.w * spatial(bt.i + 1);
}

SpaceTimeFunction as_function(ScalarField field)
{
  auto shared = std::make_shared<const ScalarField>(std::move(field));
  return [shared](const Point &x, double t) { return interpolate(*shared, x, t); };
}

double integrate_q_norm(const ScalarField &field, const Cylinder &region, double q)
{
  if (!(q > 0.0))
  {
    throw DomainError("integrate_q_norm needs q > 0");
  }
  if (!(region.t2 > region.t1))
  {
    throw DomainError("cylinder needs t1 < t2");
  }
  const Grid &g = field.grid();
  const bool radial = g.kind == GridKind::Radial;
  const int n = g.radial_dim;

  std::array<std::vector<double>, 2> axis_w;
  for (int a = 0; a < 2; ++a)
  {
    axis_w[a].assign(g.counts[a], a < g.spatial_dims() ? 0.0 : 1.0);
    if (a >= g.spatial_dims())
    {
      continue;
    }
    const double lo = region.center[a] - region.half[a];
    const double hi = region.center[a] + region.half[a];
    for (int i = 0; i < g.counts[a]; ++i)
    {
      axis_w[a][i] = cell_measure(g.coord(a, i), g.h, lo, hi, radial, n);
    }
  }
  std::vector<double> time_w(g.time_size());
  for (int k = 0; k < g.time_size(); ++k)
  {
    time_w[k] = cell_measure(g.time(k), g.dt, region.t1, region.t2, false, 1);
  }

  double total = 0.0;
  bool touched = false;
  for (int k = 0; k < g.time_size(); ++k)
  {
    if (time_w[k] == 0.0)
    {
      continue;
    }
    for (int iy = 0; iy < g.counts[1]; ++iy)
    {
      if (axis_w[1][iy] == 0.0)
      {
        continue;
      }
      for (int ix = 0; ix < g.counts[0]; ++ix)
      {
        const double w = axis_w[0][ix] * axis_w[1][iy] * time_w[k];
        if (w == 0.0)
        {
          continue;
        }
        touched = true;
        const double v = std::abs(field(k, g.flat_index(ix, iy)));
        if (v != 0.0)
        {
          total += w * std::pow(v, q);
        }
      }
    }
  }
  if (!touched)
  {
    throw DomainError("integration region does not intersect the grid");
  }
  return total;
}

ScalarField truncate(const ScalarField &field, double j)
{
  if (!(j > 0.0))
  {
    throw DomainError("truncation level must be positive");
  }
  const double cap = field.cap() ? std::min(*field.cap(), j) : j;
  return ScalarField(field.grid(), field.values().min(cap), cap);
}

ScalarField extend_to_past(const ScalarField &field, double new_t0)
{
  const Grid &g = field.grid();
  if (!(new_t0 < g.t0))
  {
    throw DomainError("extend_to_past needs new_t0 before the field start");
  }
  if (field.values().size() > 0 && field.min() < 0.0)
  {
    throw ContractError("extension by zero is only valid for non-negative fields");
  }
  // Tolerate round-off so that exact multiples of dt do not gain an extra slice.
  const int pad = static_cast<int>(std::ceil((g.t0 - new_t0) / g.dt - 1e-9));
  Grid extended = g.with_time(g.t0 - pad * g.dt, g.dt, g.steps + pad);
  Eigen::ArrayXXd values = Eigen::ArrayXXd::Zero(extended.time_size(), g.space_size());
  values.bottomRows(g.time_size()) = field.values();
  return ScalarField(extended, std::move(values), field.cap());
}

ScalarField restrict_time(const ScalarField &field, int k_begin, int k_end)
{
  const Grid &g = field.grid();
  if (k_begin < 0 || k_end >= g.time_size() || k_end < k_begin)
  {
    throw DomainError("restrict_time slice range outside the grid");
  }
  Grid sub = g.with_time(g.time(k_begin), g.dt, k_end - k_begin);
  return ScalarField(sub, field.values().middleRows(k_begin, k_end - k_begin + 1),
                     field.cap());
}

double sphere_area(int n)
{
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

}  // namespace slowdiff
