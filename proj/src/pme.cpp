// Copyright 2026 The slowdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "slowdiff/pme.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "slowdiff/evolution.hpp"

namespace slowdiff
{

PMESeparableSpec make_pme_separable(const Grid &domain, const MediumParams &params, double t0,
                                    const MinimizerOptions &options)
{
  return {minimize_quotient(domain, params, Equation::PME, options), t0};
}

double pme_separable_eval(const PMESeparableSpec &spec, const Point &x, double t)
{
  if (spec.giant.equation != Equation::PME)
  {
    throw ContractError("PME separable solution needs a giant profile");
  }
  const double g = spec.giant.value_at(x);
  if (!(t > spec.t0))
  {
    return 0.0;
  }
  return g / std::pow(t - spec.t0, spec.giant.decay_exponent());
}

SpaceTimeFunction pme_separable_function(const PMESeparableSpec &spec)
{
  auto shared = std::make_shared<const PMESeparableSpec>(spec);
  return [shared](const Point &x, double t) { return pme_separable_eval(*shared, x, t); };
}

ClassVerdict pme_classify(const ScalarField &field, const MediumParams &params,
                          const ClassifyOptions &options)
{
  return classify_field(field, params, Equation::PME, options);
}

ClassVerdict pme_classify(const SpaceTimeFunction &v, const Grid &sampling,
                          const MediumParams &params, const ClassifyOptions &options)
{
  return classify_field(v, sampling, params, Equation::PME, options);
}

double pme_truncation_gradient_check(const ScalarField &field, double m, double j,
                                     const Cylinder &window)
{
  if (!(m > 1.0) || !(j > 0.0))
  {
    throw ParameterError("truncation check needs m > 1 and j > 0");
  }
  const Grid &g = field.grid();
  if (g.kind == GridKind::Radial)
  {
    throw ConfigError("truncation check runs on interval or box grids");
  }
  const int dims = g.spatial_dims();
  const int nx = g.counts[0], ny = g.counts[1];
  const double h = g.h;
  const double cell = std::pow(h, dims);
  auto inside = [&](int a, int i) {
    const double x = g.coord(a, i);
    return x >= window.center[a] - window.half[a] - 1e-12 * h &&
           x <= window.center[a] + window.half[a] + 1e-12 * h;
  };

  std::vector<int> ks;
  for (int k = 0; k < g.time_size(); ++k)
  {
    const double t = g.time(k);
    if (t >= window.t1 - 1e-12 * g.dt && t <= window.t2 + 1e-12 * g.dt)
    {
      ks.push_back(k);
    }
  }
  if (ks.size() < 2)
  {
    return 0.0;
  }
  auto w = [&](int k, int i) { return std::min(std::pow(std::max(field(k, i), 0.0), m), j); };
  auto slice = [&](int k) {
    double s = 0.0;
    if (dims == 1)
    {
      for (int i = 0; i + 1 < nx; ++i)
      {
        if (inside(0, i) && inside(0, i + 1))
        {
          const double d = (w(k, i + 1) - w(k, i)) / h;
          s += cell * d * d;
        }
      }
      return s;
    }
    for (int b = 0; b + 1 < ny; ++b)
    {
      for (int a = 0; a + 1 < nx; ++a)
      {
        if (!(inside(0, a) && inside(0, a + 1) && inside(1, b) && inside(1, b + 1)))
        {
          continue;
        }
        auto at = [&](int i, int jj) { return w(k, g.flat_index(i, jj)); };
        const double dx0 = (at(a + 1, b) - at(a, b)) / h, dx1 = (at(a + 1, b + 1) - at(a, b + 1)) / h;
        const double dy0 = (at(a, b + 1) - at(a, b)) / h, dy1 = (at(a + 1, b + 1) - at(a + 1, b)) / h;
        s += cell * 0.5 * (dx0 * dx0 + dx1 * dx1 + dy0 * dy0 + dy1 * dy1);
      }
    }
    return s;
  };
  double total = 0.0, prev = slice(ks[0]);
  for (std::size_t s = 1; s < ks.size(); ++s)
  {
    const double cur = slice(ks[s]);
    total += 0.5 * (g.time(ks[s]) - g.time(ks[s - 1])) * (prev + cur);
    prev = cur;
  }
  return total;
}

namespace
{

// Node position along the profile grid for a signed (interval) or radial coordinate.
bool locate(const Grid &g, double xi, int &i, double &s)
{
  const double u = (xi - g.origin[0]) / g.h;
  if (!(u >= 0.0) || u > g.counts[0] - 1)
  {
    return false;
  }
  i = std::min(static_cast<int>(u), g.counts[0] - 2);
  s = u - i;
  return true;
}

double profile_coordinate(const PMEProfile &p, const Point &x)
{
  if (p.grid.kind == GridKind::Radial)
  {
    return p.params.n == 2 ? x.norm() : std::abs(x[0]);
  }
  return x[0];
}

}  // namespace

double PMEProfile::profile(double xi) const
{
  int i = 0;
  double s = 0.0;
  if (!locate(grid, xi, i, s))
  {
    return 0.0;
  }
  return (1.0 - s) * F[i] + s * F[i + 1];
}

double PMEProfile::power_derivative(double xi) const
{
  int i = 0;
  double s = 0.0;
  if (!locate(grid, xi, i, s))
  {
    return 0.0;
  }
  const double m = *params.m;
  return (std::pow(F[i + 1], m) - std::pow(F[i], m)) / grid.h;
}

double PMEProfile::support_radius() const
{
  double r = 0.0;
  for (int i = 0; i < grid.counts[0]; ++i)
  {
    if (F[i] > 0.0)
    {
      r = std::max(r, std::abs(grid.coord(0, i)));
    }
  }
  return r;
}

PMEProfile evolve_pme_profile(const MediumParams &params, const PMEProfileOptions &o)
{
  params.validate(Equation::PME);
  if (!(o.mass > 0.0) || !(o.extent > 0.0) || o.cells < 8 || !(o.bump_cells > 0.0))
  {
    throw ConfigError("invalid PME profile options");
  }
  const int n = params.n;
  const double m = *params.m;
  const bool radial = n > 1;
  Grid g = radial ? Grid::radial(o.extent / o.cells, o.cells + 1, n, 0.0, 1.0, 1)
                  : Grid::interval_span(-o.extent, o.extent, o.cells, 0.0, 1.0, 1);
  const double width = o.bump_cells * g.h;

  Eigen::VectorXd u0(g.space_size());
  double mass = 0.0;
  for (int i = 0; i < g.space_size(); ++i)
  {
    const double r = std::abs(g.coord(0, i));
    u0[i] = std::max(0.0, 1.0 - (r / width) * (r / width));
    double vol = g.h;
    if (radial)
    {
      const double a = std::max(0.0, r - 0.5 * g.h), b = r + 0.5 * g.h;
      vol = sphere_area(n) * (std::pow(b, n) - std::pow(a, n)) / n;
    }
    mass += vol * u0[i];
  }
  u0 *= o.mass / mass;

  EvolutionProblem pr;
  pr.params = params;
  pr.equation = Equation::PME;
  pr.grid = g;
  pr.initial = u0;
  pr.left = BoundaryData::dirichlet(0.0);
  pr.right = BoundaryData::dirichlet(0.0);
  const SolveReport rep = evolve(pr);

  PMEProfile out;
  out.params = params;
  out.grid = g.spatial();
  out.F = rep.field.slice(g.steps).matrix();
  if (out.F[0] > 0.0 && !radial)
  {
    throw NumericError("PME profile reached the grid boundary; enlarge the extent");
  }
  if (out.F[g.space_size() - 1] > 0.0)
  {
    throw NumericError("PME profile reached the grid boundary; enlarge the extent");
  }
  out.mass = o.mass;
  const double lambda = n * (m - 1.0) + 2.0;
  out.alpha = n / lambda;
  out.beta = 1.0 / lambda;
  return out;
}

double pme_profile_eval(const PMEProfile &p, const Point &x, double t)
{
  if (!(t > 0.0))
  {
    return 0.0;
  }
  return std::pow(t, -p.alpha) * p.profile(profile_coordinate(p, x) * std::pow(t, -p.beta));
}

double pme_profile_power_gradient(const PMEProfile &p, const Point &x, double t)
{
  if (!(t > 0.0))
  {
    return 0.0;
  }
  const double m = *p.params.m;
  const double d = p.power_derivative(profile_coordinate(p, x) * std::pow(t, -p.beta));
  return std::pow(t, -p.alpha * m - p.beta) * std::abs(d);
}

SpaceTimeFunction pme_profile_function(const PMEProfile &profile)
{
  auto shared = std::make_shared<const PMEProfile>(profile);
  return [shared](const Point &x, double t) { return pme_profile_eval(*shared, x, t); };
}

}  // namespace slowdiff
