// Copyright 2026 The slowdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <numbers>
#include <vector>

namespace slowdiff::quad
{

// Gauss-Legendre rule on [-1, 1]; nodes by Newton iteration on P_n.
template <typename Scalar = double>
class GaussLegendre
{
public:
  explicit GaussLegendre(int n) : x_(n), w_(n)
  {
    for (int i = 0; i < (n + 1) / 2; ++i)
    {
      Scalar z = std::cos(std::numbers::pi_v<Scalar> * (i + Scalar(0.75)) / (n + Scalar(0.5)));
      Scalar dp = 0;
      for (int it = 0; it < 100; ++it)
      {
        Scalar p0 = 1, p1 = z;
        for (int k = 2; k <= n; ++k)
        {
          const Scalar p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (z * p1 - p0) / (z * z - 1);
        const Scalar dz = p1 / dp;
        z -= dz;
        if (std::abs(dz) < Scalar(1e-15))
        {
          break;
        }
      }
      x_[i] = -z;
      x_[n - 1 - i] = z;
      w_[i] = w_[n - 1 - i] = 2 / ((1 - z * z) * dp * dp);
    }
  }

  int size() const { return static_cast<int>(x_.size()); }

  template <typename F>
  Scalar integrate(F &&f, Scalar a, Scalar b) const
  {
    const Scalar mid = (a + b) / 2, half = (b - a) / 2;
    Scalar s = 0;
    for (int i = 0; i < size(); ++i)
    {
      s += w_[i] * f(mid + half * x_[i]);
    }
    return s * half;
  }

  // Same as integrate, but f receives (x, b - x) so integrands singular at b can be
  // evaluated without cancellation.
  template <typename F>
  Scalar integrate_with_gap(F &&f, Scalar a, Scalar b) const
  {
    const Scalar half = (b - a) / 2;
    Scalar s = 0;
    for (int i = 0; i < size(); ++i)
    {
      const Scalar gap = half * (1 - x_[i]);
      s += w_[i] * f(b - gap, gap);
    }
    return s * half;
  }

private:
  std::vector<Scalar> x_, w_;
};

template <typename Scalar, typename F>
Scalar composite(F &&f, Scalar a, Scalar b, int panels, const GaussLegendre<Scalar> &rule)
{
  const Scalar h = (b - a) / panels;
  Scalar s = 0;
  for (int k = 0; k < panels; ++k)
  {
    s += rule.integrate(f, a + k * h, a + (k + 1) * h);
  }
  return s;
}

// Panels shrink geometrically (factor 2) toward b; f(x, b - x). Suited to integrable
// algebraic endpoint singularities or endpoint derivative singularities at b.
template <typename Scalar, typename F>
Scalar graded_toward_right(F &&f, Scalar a, Scalar b, int levels,
                           const GaussLegendre<Scalar> &rule)
{
  Scalar s = 0;
  Scalar left = a;
  Scalar gap = b - a;
  for (int k = 0; k < levels; ++k)
  {
    gap /= 2;
    const Scalar right = b - gap;
    s += rule.integrate_with_gap(
        [&](Scalar x, Scalar g) { return f(x, g + gap); }, left, right);
    left = right;
  }
  // Final panel touching b keeps the exact gap for the integrand.
  s += rule.integrate_with_gap(f, left, b);
  return s;
}

}  // namespace slowdiff::quad
