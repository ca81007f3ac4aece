// Copyright 2026 The slowdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "slowdiff/regularization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace slowdiff
{

namespace
{

struct Range
{
  int begin = 0, end = -1;  // inclusive
  int size() const { return end - begin + 1; }
};

Range nodes_inside(double origin, double step, int count, double lo, double hi)
{
  const double tol = 1e-9 * step;
  Range r;
  r.begin = std::max(0, static_cast<int>(std::ceil((lo - origin) / step - 1e-9)));
  r.end = std::min(count - 1, static_cast<int>(std::floor((hi - origin) / step + 1e-9)));
  while (r.begin <= r.end && origin + r.begin * step < lo - tol)
  {
    ++r.begin;
  }
  while (r.end >= r.begin && origin + r.end * step > hi + tol)
  {
    --r.end;
  }
  return r;
}

// Quadratic penalty for an index offset d on an axis with spacing step.
std::vector<double> penalty_table(int n, double step, double eps)
{
  std::vector<double> q(n);
  for (int d = 0; d < n; ++d)
  {
    const double dist = static_cast<double>(d) * step;
    q[d] = dist * dist / (2.0 * eps);
  }
  return q;
}

// out[i] = min_j fl(f[j] + q[|i - j|]) via the lower envelope of the parabolas
// f[j] + (x - y_j)^2 / (2 eps); near envelope breakpoints the neighbours are re-checked
// with the rounded formula so the result matches the direct minimum.
void envelope_1d(const std::vector<double> &f, const std::vector<double> &q, double step,
                 double eps, std::vector<double> &out)
{
  const int n = static_cast<int>(f.size());
  out.assign(n, 0.0);
  std::vector<int> v(n);
  std::vector<double> z(n + 1);
  auto intersect = [&](int a, int b) {
    // abscissa (in index units) where parabolas a > b meet
    const double ya = a * step, yb = b * step;
    return (eps * (f[a] - f[b]) / (ya - yb) + 0.5 * (ya + yb)) / step;
  };
  int k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  for (int j = 1; j < n; ++j)
  {
    double s = intersect(j, v[k]);
    while (s <= z[k])
    {
      --k;
      s = intersect(j, v[k]);
    }
    ++k;
    v[k] = j;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  const int hull = k + 1;
  k = 0;
  auto value = [&](int j, int i) { return f[j] + q[std::abs(i - j)]; };
  for (int i = 0; i < n; ++i)
  {
    while (k + 1 < hull && z[k + 1] < i)
    {
      ++k;
    }
    double best = value(v[k], i);
    for (int off = -2; off <= 2; ++off)
    {
      const int kk = k + off;
      if (kk >= 0 && kk < hull)
      {
        best = std::min(best, value(v[kk], i));
      }
    }
    out[i] = best;
  }
}

}  // namespace

ScalarField inf_convolve(const ScalarField &field, const InfConvSpec &spec, InfConvMethod method)
{
  if (!(spec.epsilon > 0.0) || !std::isfinite(spec.epsilon))
  {
    throw ParameterError("infimal convolution needs epsilon > 0");
  }
  const Grid &g = field.grid();
  const bool box = g.kind == GridKind::Box2D;
  const Cylinder &d = spec.domain;
  const Range rx = nodes_inside(g.origin[0], g.h, g.counts[0], d.center[0] - d.half[0],
                                d.center[0] + d.half[0]);
  const Range ry = box ? nodes_inside(g.origin[1], g.h, g.counts[1], d.center[1] - d.half[1],
                                      d.center[1] + d.half[1])
                       : Range{0, 0};
  const Range rt = nodes_inside(g.t0, g.dt, g.time_size(), d.t1, d.t2);
  if (rx.size() < 1 || ry.size() < 1 || rt.size() < 1)
  {
    throw DomainError("infimal convolution domain holds no grid nodes");
  }
  const int nx = rx.size(), ny = ry.size(), nt = rt.size();
  const double eps = spec.epsilon;
  const std::vector<double> qx = penalty_table(nx, g.h, eps);
  const std::vector<double> qy = penalty_table(ny, g.h, eps);
  const std::vector<double> qt = penalty_table(nt, g.dt, eps);

  // Local storage a[(k * ny + iy) * nx + ix].
  std::vector<double> a(static_cast<std::size_t>(nx) * ny * nt);
  auto at = [&](int ix, int iy, int k) -> double & {
    return a[(static_cast<std::size_t>(k) * ny + iy) * nx + ix];
  };
  for (int k = 0; k < nt; ++k)
  {
    for (int iy = 0; iy < ny; ++iy)
    {
      for (int ix = 0; ix < nx; ++ix)
      {
        at(ix, iy, k) = field(rt.begin + k, g.flat_index(rx.begin + ix, ry.begin + iy));
      }
    }
  }

  std::vector<double> result(a.size());
  auto res = [&](int ix, int iy, int k) -> double & {
    return result[(static_cast<std::size_t>(k) * ny + iy) * nx + ix];
  };

  if (method == InfConvMethod::BruteForce)
  {
    for (int k = 0; k < nt; ++k)
    {
      for (int iy = 0; iy < ny; ++iy)
      {
        for (int ix = 0; ix < nx; ++ix)
        {
          double best = std::numeric_limits<double>::infinity();
          for (int kk = 0; kk < nt; ++kk)
          {
            const double pt = qt[std::abs(k - kk)];
            for (int jy = 0; jy < ny; ++jy)
            {
              const double py = qy[std::abs(iy - jy)];
              for (int jx = 0; jx < nx; ++jx)
              {
                double s = at(jx, jy, kk) + qx[std::abs(ix - jx)];
                if (box)
                {
                  s = s + py;
                }
                s = s + pt;
                best = std::min(best, s);
              }
            }
          }
          res(ix, iy, k) = best;
        }
      }
    }
  }
  else
  {
    std::vector<double> line, out;
    // x sweep
    for (int k = 0; k < nt; ++k)
    {
      for (int iy = 0; iy < ny; ++iy)
      {
        line.resize(nx);
        for (int ix = 0; ix < nx; ++ix)
        {
          line[ix] = at(ix, iy, k);
        }
        envelope_1d(line, qx, g.h, eps, out);
        for (int ix = 0; ix < nx; ++ix)
        {
          at(ix, iy, k) = out[ix];
        }
      }
    }
    if (box)
    {
      for (int k = 0; k < nt; ++k)
      {
        for (int ix = 0; ix < nx; ++ix)
        {
          line.resize(ny);
          for (int iy = 0; iy < ny; ++iy)
          {
            line[iy] = at(ix, iy, k);
          }
          envelope_1d(line, qy, g.h, eps, out);
          for (int iy = 0; iy < ny; ++iy)
          {
            at(ix, iy, k) = out[iy];
          }
        }
      }
    }
    for (int iy = 0; iy < ny; ++iy)
    {
      for (int ix = 0; ix < nx; ++ix)
      {
        line.resize(nt);
        for (int k = 0; k < nt; ++k)
        {
          line[k] = at(ix, iy, k);
        }
        envelope_1d(line, qt, g.dt, eps, out);
        for (int k = 0; k < nt; ++k)
        {
          res(ix, iy, k) = out[k];
        }
      }
    }
  }

  Grid sub = g;
  sub.origin[0] = g.coord(0, rx.begin);
  if (box)
  {
    sub.origin[1] = g.coord(1, ry.begin);
  }
  sub.counts = {nx, box ? ny : 1};
  if (nx < 2 || (box && ny < 2))
  {
    throw DomainError("infimal convolution domain needs two nodes per axis");
  }
  sub.t0 = g.time(rt.begin);
  sub.steps = nt - 1;
  Eigen::ArrayXXd values(nt, sub.space_size());
  for (int k = 0; k < nt; ++k)
  {
    for (int iy = 0; iy < ny; ++iy)
    {
      for (int ix = 0; ix < nx; ++ix)
      {
        values(k, sub.flat_index(ix, iy)) = res(ix, iy, k);
      }
    }
  }
  return ScalarField(sub, std::move(values));
}

}  // namespace slowdiff
