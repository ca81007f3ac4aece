// Copyright 2026 The slowdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "slowdiff/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace slowdiff
{

const char *to_string(Verdict v)
{
  switch (v)
  {
  case Verdict::Finite:
    return "Finite";
  case Verdict::Divergent:
    return "Divergent";
  case Verdict::Inconclusive:
    return "Inconclusive";
  }
  return "?";
}

const char *to_string(ClassLabel l)
{
  switch (l)
  {
  case ClassLabel::B:
    return "B";
  case ClassLabel::M:
    return "M";
  case ClassLabel::Unknown:
    return "Unknown";
  }
  return "?";
}

SingularHint SingularHint::point(const Point &x, double t, double r0, double T0, double lambda)
{
  SingularHint h;
  h.kind = Kind::Point;
  h.x = x;
  h.t = t;
  h.radius = r0;
  h.duration = T0;
  h.lambda = lambda;
  return h;
}

SingularHint SingularHint::time_slice(double t, const Cylinder &region, double tau0)
{
  SingularHint h;
  h.kind = Kind::TimeSlice;
  h.t = t;
  h.region = region;
  h.duration = tau0;
  return h;
}

namespace
{

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_summability_args(const SingularHint &hint, double q, const SummabilityOptions &o)
{
  if (!(q > 0.0))
  {
    throw DomainError("summability exponent must be positive");
  }
  if (!(hint.radius > 0.0) || !(hint.duration > 0.0) || !(o.factor > 1.0) || o.shells < 2 ||
      o.tail < 1 || o.samples_per_dim < 1)
  {
    throw ConfigError("invalid shell configuration");
  }
}

Cylinder shell_cylinder(const SingularHint &hint, int k, int dims, double factor)
{
  Cylinder c;
  if (hint.kind == SingularHint::Kind::Point)
  {
    const double r = hint.radius * std::pow(factor, -k);
    const double T = hint.duration * std::pow(factor, -k * hint.lambda);
    c.center = hint.x;
    c.half = Point(r, dims == 2 ? r : 0.0);
    c.t1 = hint.t - T;
    c.t2 = hint.t + T;
  }
  else
  {
    const double tau = hint.duration * std::pow(factor, -k);
    c.center = hint.region.center;
    c.half = hint.region.half;
    c.t1 = std::max(hint.t - tau, hint.region.t1);
    c.t2 = std::min(hint.t + tau, hint.region.t2);
  }
  if (dims == 1)
  {
    c.half[1] = 0.0;
  }
  return c;
}

double shell_scale(const SingularHint &hint, int k, double factor)
{
  return (hint.kind == SingularHint::Kind::Point ? hint.radius : hint.duration) *
         std::pow(factor, -k);
}

void finish_verdict(SummabilityReport &rep, const SummabilityOptions &o)
{
  const auto &s = rep.shells;
  bool all_zero = true;
  for (const auto &sh : s)
  {
    all_zero = all_zero && sh.value == 0.0;
  }
  rep.ratios.clear();
  for (std::size_t k = 0; k + 1 < s.size(); ++k)
  {
    const double a = s[k].value, b = s[k + 1].value;
    rep.ratios.push_back(a > 0.0 ? b / a : (b > 0.0 ? kInf : 0.0));
  }
  if (all_zero && !s.empty())
  {
    rep.verdict = Verdict::Finite;
    rep.tail_ratio = 0.0;
    rep.note = "all shell integrals vanish";
    return;
  }
  if (static_cast<int>(rep.ratios.size()) < o.tail)
  {
    rep.verdict = Verdict::Inconclusive;
    rep.note = "too few resolvable shells";
    rep.tail_ratio = rep.ratios.empty() ? 0.0 : rep.ratios.back();
    return;
  }
  bool divergent = true, finite = true;
  double log_sum = 0.0;
  bool has_zero = false, has_inf = false;
  for (std::size_t k = rep.ratios.size() - o.tail; k < rep.ratios.size(); ++k)
  {
    const double r = rep.ratios[k];
    divergent = divergent && r >= o.divergent_ratio;
    finite = finite && r < o.finite_ratio;
    if (r == 0.0)
    {
      has_zero = true;
    }
    else if (!std::isfinite(r))
    {
      has_inf = true;
    }
    else
    {
      log_sum += std::log(r);
    }
  }
  rep.tail_ratio = has_inf ? kInf : (has_zero ? 0.0 : std::exp(log_sum / o.tail));
  rep.verdict = divergent ? Verdict::Divergent : (finite ? Verdict::Finite : Verdict::Inconclusive);
  if (rep.verdict == Verdict::Inconclusive)
  {
    rep.note = "tail ratios inside the undecided band";
  }
}

// Midpoint rule with n points per axis on a box piece.
double midpoint_piece(const SpaceTimeFunction &v, const Cylinder &c, int dims, double q, int n)
{
  const double lx = 2.0 * c.half[0], ly = dims == 2 ? 2.0 * c.half[1] : 1.0;
  const double lt = c.t2 - c.t1;
  if (!(lx > 0.0) || !(ly > 0.0) || !(lt > 0.0))
  {
    return 0.0;
  }
  const double x0 = c.center[0] - c.half[0], y0 = c.center[1] - c.half[1];
  const int ny = dims == 2 ? n : 1;
  double s = 0.0;
  for (int k = 0; k < n; ++k)
  {
    const double t = c.t1 + (k + 0.5) * lt / n;
    for (int j = 0; j < ny; ++j)
    {
      const double y = dims == 2 ? y0 + (j + 0.5) * ly / n : 0.0;
      for (int i = 0; i < n; ++i)
      {
        const double x = x0 + (i + 0.5) * lx / n;
        s += std::pow(std::abs(v(Point(x, y), t)), q);
      }
    }
  }
  return s * (lx / n) * (ly / ny) * (lt / n);
}

// Spatial quadrature on grid nodes (clipped cells) times time midpoints.
double nodal_piece(const SpaceTimeFunction &v, const Grid &g, const Cylinder &c, double q, int n)
{
  const double lt = c.t2 - c.t1;
  if (!(lt > 0.0))
  {
    return 0.0;
  }
  const int dims = g.spatial_dims();
  std::vector<std::pair<int, double>> nodes;
  for (int i = 0; i < g.space_size(); ++i)
  {
    const Point x = g.node(i);
    double w = 1.0;
    for (int a = 0; a < dims; ++a)
    {
      const double lo = std::max(c.center[a] - c.half[a], x[a] - 0.5 * g.h);
      const double hi = std::min(c.center[a] + c.half[a], x[a] + 0.5 * g.h);
      w *= std::max(0.0, hi - lo);
    }
    if (w > 0.0)
    {
      nodes.emplace_back(i, w);
    }
  }
  double s = 0.0;
  for (int k = 0; k < n; ++k)
  {
    const double t = c.t1 + (k + 0.5) * lt / n;
    for (const auto &[i, w] : nodes)
    {
      s += w * std::pow(std::abs(v(g.node(i), t)), q);
    }
  }
  return s * lt / n;
}

}  // namespace

SummabilityReport classify_summability(const SpaceTimeFunction &v, int dims,
                                       const SingularHint &hint, double q,
                                       const SummabilityOptions &o)
{
  check_summability_args(hint, q, o);
  if (dims != 1 && dims != 2)
  {
    throw ConfigError("summability shells support one or two spatial dimensions");
  }
  SummabilityReport rep;
  rep.q = q;
  for (int k = 0; k < o.shells; ++k)
  {
    const Cylinder outer = shell_cylinder(hint, k, dims, o.factor);
    const Cylinder inner = shell_cylinder(hint, k + 1, dims, o.factor);
    double total = 0.0;
    if (hint.kind == SingularHint::Kind::TimeSlice)
    {
      // Below and above the slice, full spatial region.
      Cylinder below = outer, above = outer;
      below.t2 = std::max(inner.t1, outer.t1);
      above.t1 = std::min(inner.t2, outer.t2);
      for (const Cylinder &piece : {below, above})
      {
        total += o.spatial_nodes ? nodal_piece(v, *o.spatial_nodes, piece, q, o.samples_per_dim)
                                 : midpoint_piece(v, piece, dims, q, o.samples_per_dim);
      }
    }
    else
    {
      for (const Cylinder &piece : box_difference(outer, inner, dims))
      {
        total += midpoint_piece(v, piece, dims, q, o.samples_per_dim);
      }
    }
    rep.shells.push_back({k, shell_scale(hint, k, o.factor), total});
  }
  finish_verdict(rep, o);
  return rep;
}

SummabilityReport classify_summability(const ScalarField &field, const SingularHint &hint,
                                       double q, const SummabilityOptions &o)
{
  check_summability_args(hint, q, o);
  const Grid &g = field.grid();
  const int dims = g.spatial_dims();
  const Cylinder extent = grid_extent(g);
  SummabilityReport rep;
  rep.q = q;
  for (int k = 0; k < o.shells; ++k)
  {
    const Cylinder outer = shell_cylinder(hint, k, dims, o.factor);
    const Cylinder inner = shell_cylinder(hint, k + 1, dims, o.factor);
    const double dt_thick = 0.5 * ((outer.t2 - outer.t1) - (inner.t2 - inner.t1));
    const double dx_thick = outer.half[0] - inner.half[0];
    const bool too_thin =
        hint.kind == SingularHint::Kind::Point
            ? (dx_thick < 2.0 * g.h || dt_thick < 2.0 * g.dt)
            : dt_thick < 2.0 * g.dt;
    if (too_thin)
    {
      rep.note = "shells reached grid resolution";
      break;
    }
    double total = 0.0;
    for (const Cylinder &piece : box_difference(outer, inner, dims))
    {
      // Clip to the grid; skip pieces outside it.
      Cylinder c = piece;
      bool empty = false;
      for (int a = 0; a < dims; ++a)
      {
        const double lo = std::max(c.center[a] - c.half[a], extent.center[a] - extent.half[a]);
        const double hi = std::min(c.center[a] + c.half[a], extent.center[a] + extent.half[a]);
        empty = empty || !(hi > lo);
        c.center[a] = 0.5 * (lo + hi);
        c.half[a] = 0.5 * (hi - lo);
      }
      c.t1 = std::max(c.t1, extent.t1);
      c.t2 = std::min(c.t2, extent.t2);
      if (empty || !(c.t2 > c.t1))
      {
        continue;
      }
      total += integrate_q_norm(field, c, q);
    }
    rep.shells.push_back({k, shell_scale(hint, k, o.factor), total});
  }
  const std::string note = rep.note;
  finish_verdict(rep, o);
  if (!note.empty() && rep.verdict == Verdict::Inconclusive)
  {
    rep.note = note;
  }
  return rep;
}

namespace
{

double slice_sup(const SpaceTimeFunction &v, const Grid &g, double t)
{
  double s = -kInf;
  for (int i = 0; i < g.space_size(); ++i)
  {
    s = std::max(s, v(g.node(i), t));
  }
  return s;
}

// Slice index k* maximizing sup_{k+1} - sup_k, or -1 without growth.
int largest_jump(const std::vector<double> &sups)
{
  int best = -1;
  double jump = 0.0;
  for (std::size_t k = 0; k + 1 < sups.size(); ++k)
  {
    const double d = sups[k + 1] - sups[k];
    if (d > jump || (std::isinf(sups[k + 1]) && !std::isinf(sups[k])))
    {
      jump = d;
      best = static_cast<int>(k);
    }
  }
  return best;
}

std::optional<double> detect_t0(const SpaceTimeFunction &v, const Grid &g)
{
  std::vector<double> sups(g.time_size());
  for (int k = 0; k < g.time_size(); ++k)
  {
    sups[k] = slice_sup(v, g, g.time(k));
  }
  const int k = largest_jump(sups);
  if (k < 0)
  {
    return std::nullopt;
  }
  double lo = g.time(k), hi = g.time(k + 1);
  const double level = sups[k + 1];
  for (int it = 0; it < 80 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it)
  {
    const double mid = 0.5 * (lo + hi);
    if (slice_sup(v, g, mid) >= level)
    {
      hi = mid;
    }
    else
    {
      lo = mid;
    }
  }
  return lo;
}

std::optional<double> detect_t0(const ScalarField &f)
{
  const Grid &g = f.grid();
  std::vector<double> sups(g.time_size());
  for (int k = 0; k < g.time_size(); ++k)
  {
    sups[k] = f.values().row(k).maxCoeff();
  }
  const int k = largest_jump(sups);
  if (k < 0)
  {
    return std::nullopt;
  }
  return g.time(k);
}

Cylinder spatial_region(const Grid &g)
{
  Cylinder c;
  for (int a = 0; a < 2; ++a)
  {
    if (a < g.spatial_dims())
    {
      const double lo = g.origin[a], hi = g.coord(a, g.counts[a] - 1);
      c.center[a] = 0.5 * (lo + hi);
      c.half[a] = 0.5 * (hi - lo);
    }
    else
    {
      c.center[a] = 0.0;
      c.half[a] = 0.0;
    }
  }
  c.t1 = g.t0;
  c.t2 = g.t_end();
  return c;
}

bool in_core(const Grid &g, const Point &x, double fraction)
{
  const Cylinder r = spatial_region(g);
  for (int a = 0; a < g.spatial_dims(); ++a)
  {
    if (std::abs(x[a] - r.center[a]) > 0.5 * fraction * 2.0 * r.half[a] + 1e-12 * g.h)
    {
      return false;
    }
  }
  return true;
}

ClassLabel label_for(Verdict v, double floor)
{
  if (v == Verdict::Divergent && floor > 0.0)
  {
    return ClassLabel::M;
  }
  if (v == Verdict::Finite)
  {
    return ClassLabel::B;
  }
  return ClassLabel::Unknown;
}

SingularHint class_hint(const Grid &g, std::optional<double> t0, const ClassifyOptions &o)
{
  const double t_hint = t0 ? *t0 : g.t0;
  const double span = g.t_end() - t_hint;
  if (!(span > 0.0))
  {
    throw ConfigError("candidate slice leaves no time window");
  }
  return SingularHint::time_slice(t_hint, spatial_region(g), o.shell_fraction * span);
}

}  // namespace

ClassVerdict classify_field(const SpaceTimeFunction &v, const Grid &sampling,
                            const MediumParams &params, Equation eq, const ClassifyOptions &o)
{
  const DerivedConstants dc = derived_constants(params, eq);
  sampling.validate();
  ClassVerdict out;
  out.threshold_q = dc.class_threshold;
  out.t0_detected = detect_t0(v, sampling);

  SummabilityOptions so = o.summability;
  so.spatial_nodes = sampling.spatial();
  const SingularHint hint = class_hint(sampling, out.t0_detected, o);
  out.evidence.push_back(classify_summability(v, sampling.spatial_dims(), hint,
                                              dc.class_threshold, so));

  if (out.t0_detected)
  {
    const double t0 = *out.t0_detected;
    const double tau = o.window_fraction * (sampling.t_end() - t0);
    double floor = kInf;
    for (int i = 0; i < sampling.space_size(); ++i)
    {
      const Point x = sampling.node(i);
      if (!in_core(sampling, x, o.core_fraction))
      {
        continue;
      }
      for (int j = 1; j <= o.floor_time_samples; ++j)
      {
        const double dtj = tau * j / o.floor_time_samples;
        floor = std::min(floor, v(x, t0 + dtj) * std::pow(dtj, dc.decay_exponent));
      }
    }
    out.minorant_floor = std::isfinite(floor) ? floor : 0.0;
  }
  out.label = label_for(out.evidence.front().verdict, out.minorant_floor);
  return out;
}

ClassVerdict classify_field(const ScalarField &field, const MediumParams &params, Equation eq,
                            const ClassifyOptions &o)
{
  const DerivedConstants dc = derived_constants(params, eq);
  const Grid &g = field.grid();
  ClassVerdict out;
  out.threshold_q = dc.class_threshold;
  out.t0_detected = detect_t0(field);
  const SingularHint hint = class_hint(g, out.t0_detected, o);
  out.evidence.push_back(classify_summability(field, hint, dc.class_threshold, o.summability));

  if (out.t0_detected)
  {
    const double t0 = *out.t0_detected;
    const double tau = o.window_fraction * (g.t_end() - t0);
    double floor = kInf;
    for (int k = 0; k < g.time_size(); ++k)
    {
      const double dtk = g.time(k) - t0;
      if (!(dtk > 0.0) || dtk > tau * (1.0 + 1e-12))
      {
        continue;
      }
      for (int i = 0; i < g.space_size(); ++i)
      {
        if (in_core(g, g.node(i), o.core_fraction))
        {
          floor = std::min(floor, field(k, i) * std::pow(dtk, dc.decay_exponent));
        }
      }
    }
    out.minorant_floor = std::isfinite(floor) ? floor : 0.0;
  }
  out.label = label_for(out.evidence.front().verdict, out.minorant_floor);
  return out;
}

namespace
{

std::vector<int> boundary_adjacent_nodes(const Grid &g)
{
  std::vector<int> nodes;
  const int nx = g.counts[0], ny = g.counts[1];
  const int ox = nx >= 3 ? 1 : 0;
  if (g.spatial_dims() == 1)
  {
    nodes.push_back(ox);
    if (nx - 1 - ox != ox || g.kind == GridKind::Radial)
    {
      nodes.push_back(nx - 1 - ox);
    }
    if (g.kind == GridKind::Radial)
    {
      nodes.erase(nodes.begin());  // r = 0 is not lateral boundary
    }
    return nodes;
  }
  const int oy = ny >= 3 ? 1 : 0;
  for (int j = oy; j <= ny - 1 - oy; ++j)
  {
    for (int i = ox; i <= nx - 1 - ox; ++i)
    {
      if (i == ox || i == nx - 1 - ox || j == oy || j == ny - 1 - oy)
      {
        nodes.push_back(g.flat_index(i, j));
      }
    }
  }
  return nodes;
}

}  // namespace

bool boundary_boundedness_check(const ScalarField &field, const BoundaryCheckOptions &o)
{
  const Grid &g = field.grid();
  const double last = field.values().row(g.steps).maxCoeff();
  const double threshold = o.threshold ? *o.threshold : 1e6 * std::max(1.0, last);
  double mx = -kInf;
  for (int k = 0; k < g.time_size(); ++k)
  {
    for (int i : boundary_adjacent_nodes(g))
    {
      mx = std::max(mx, field(k, i));
    }
  }
  return mx < threshold;
}

bool boundary_boundedness_check(const SpaceTimeFunction &v, const Grid &g,
                                const BoundaryCheckOptions &o)
{
  g.validate();
  const double last = slice_sup(v, g, g.t_end());
  const double threshold = o.threshold ? *o.threshold : 1e6 * std::max(1.0, last);
  const std::vector<int> nodes = boundary_adjacent_nodes(g);
  std::vector<double> times;
  for (int k = 0; k < g.time_size(); ++k)
  {
    times.push_back(g.time(k));
  }
  if (const auto t0 = detect_t0(v, g))
  {
    for (int i = 1; i <= o.approach_levels; ++i)
    {
      times.push_back(*t0 + g.dt * std::pow(2.0, -i));
    }
  }
  for (double t : times)
  {
    for (int i : nodes)
    {
      if (!(v(g.node(i), t) < threshold))
      {
        return false;
      }
    }
  }
  return true;
}

HarnackReport harnack_check(const SpaceTimeFunction &u, const Grid &domain,
                            const MediumParams &params, Equation eq, const HarnackOptions &o)
{
  params.validate(eq);
  domain.validate();
  if (!(o.C_used > 0.0) || o.samples < 1 || o.ball_points < 2)
  {
    throw ConfigError("invalid Harnack sampling options");
  }
  const int dims = domain.spatial_dims();
  const Cylinder region = spatial_region(domain);
  double width = kInf;
  for (int a = 0; a < dims; ++a)
  {
    width = std::min(width, 2.0 * region.half[a]);
  }
  const double r_lo = 4.0 * domain.h, r_hi = width / 8.0;
  if (!(r_hi > r_lo))
  {
    throw ConfigError("domain too small for Harnack radii in [4h, width/8]");
  }
  const bool pme = eq == Equation::PME;
  const double power = pme ? 2.0 : params.p;
  const double degeneracy = pme ? *params.m - 1.0 : params.p - 2.0;

  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  HarnackReport rep;
  rep.C_used = o.C_used;
  const int n = o.ball_points;
  const long attempts = static_cast<long>(o.samples) * o.attempts_per_sample;

  auto ball_points = [&](const Point &c, double radius, auto &&fn) {
    const int ny = dims == 2 ? n : 1;
    for (int j = 0; j < ny; ++j)
    {
      for (int i = 0; i < n; ++i)
      {
        Point x = c;
        x[0] += radius * (-1.0 + 2.0 * i / (n - 1));
        if (dims == 2)
        {
          x[1] += radius * (-1.0 + 2.0 * j / (n - 1));
          if ((x - c).norm() > radius * (1.0 + 1e-12))
          {
            continue;
          }
        }
        if (!fn(x))
        {
          return false;
        }
      }
    }
    return true;
  };

  for (long a = 0; a < attempts && static_cast<int>(rep.samples.size()) < o.samples; ++a)
  {
    const double R = std::exp(std::log(r_lo) + unit(rng) * (std::log(r_hi) - std::log(r_lo)));
    Point x0 = Point::Zero();
    for (int d = 0; d < 2; ++d)
    {
      const double s = unit(rng);
      if (d < dims)
      {
        x0[d] = region.center[d] - region.half[d] + s * 2.0 * region.half[d];
      }
    }
    const double t0 = region.t1 + unit(rng) * (region.t2 - region.t1);
    const double u0 = u(x0, t0);
    bool admissible = u0 > 0.0 && std::isfinite(u0);
    double theta = 0.0;
    if (admissible)
    {
      theta = o.C_used * std::pow(R, power) / std::pow(u0, degeneracy);
      for (int d = 0; d < dims; ++d)
      {
        admissible = admissible && x0[d] - 4.0 * R >= region.center[d] - region.half[d] &&
                     x0[d] + 4.0 * R <= region.center[d] + region.half[d];
      }
      admissible = admissible && t0 - 4.0 * theta >= region.t1 && t0 + 4.0 * theta <= region.t2;
    }
    if (admissible)
    {
      constexpr int time_points = 9;
      for (int k = 0; k < time_points && admissible; ++k)
      {
        const double t = t0 - 4.0 * theta + 8.0 * theta * k / (time_points - 1);
        admissible = ball_points(x0, 4.0 * R, [&](const Point &x) { return u(x, t) > 0.0; });
      }
    }
    if (!admissible)
    {
      ++rep.skipped;
      continue;
    }
    double inf = kInf;
    ball_points(x0, R, [&](const Point &x) {
      inf = std::min(inf, u(x, t0 + theta));
      return true;
    });
    rep.samples.push_back({x0, t0, R, theta, u0, inf});
    rep.gamma_measured = std::max(rep.gamma_measured, u0 / inf);
  }
  if (rep.samples.empty())
  {
    throw ConfigError("no admissible Harnack samples");
  }
  return rep;
}

double Cutoff::value(const Point &x, int dims) const
{
  const double d2 = dims == 2 ? (x - center).squaredNorm() : (x[0] - center[0]) * (x[0] - center[0]);
  const double s = d2 / (radius * radius);
  return s < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s)) : 0.0;
}

Point Cutoff::gradient(const Point &x, int dims) const
{
  Point diff = x - center;
  if (dims == 1)
  {
    diff[1] = 0.0;
  }
  const double s = diff.squaredNorm() / (radius * radius);
  if (!(s < 1.0))
  {
    return Point::Zero();
  }
  const double psi = std::exp(1.0 - 1.0 / (1.0 - s));
  return -psi / ((1.0 - s) * (1.0 - s)) * 2.0 * diff / (radius * radius);
}

CaccioppoliReport caccioppoli_check(const ScalarField &field, const Cutoff &zeta, double t1,
                                    double t2, double p)
{
  const Grid &g = field.grid();
  const int dims = g.spatial_dims();
  if (g.kind == GridKind::Radial)
  {
    throw ConfigError("Caccioppoli check runs on interval or box grids");
  }
  if (!(p > 1.0) || !(zeta.radius > 0.0))
  {
    throw ParameterError("Caccioppoli check needs p > 1 and a positive cutoff radius");
  }
  for (int a = 0; a < dims; ++a)
  {
    if (zeta.center[a] - zeta.radius < g.origin[a] ||
        zeta.center[a] + zeta.radius > g.coord(a, g.counts[a] - 1))
    {
      throw ContractError("cutoff support leaves the spatial domain");
    }
  }
  if (field.min() < 0.0)
  {
    throw ContractError("Caccioppoli check needs a non-negative field");
  }
  std::vector<int> ks;
  for (int k = 0; k < g.time_size(); ++k)
  {
    const double t = g.time(k);
    if (t >= t1 - 1e-12 * g.dt && t <= t2 + 1e-12 * g.dt)
    {
      ks.push_back(k);
    }
  }
  if (ks.size() < 2)
  {
    throw DomainError("Caccioppoli window needs two time slices");
  }
  const double h = g.h;
  const double cell = std::pow(h, dims);
  const int nx = g.counts[0], ny = g.counts[1];

  std::vector<double> zeta_node(g.space_size());
  for (int i = 0; i < g.space_size(); ++i)
  {
    zeta_node[i] = std::pow(zeta.value(g.node(i), dims), p);
  }

  auto slice_terms = [&](int k, double &energy, double &mass, double &cut) {
    energy = mass = cut = 0.0;
    for (int i = 0; i < g.space_size(); ++i)
    {
      mass += cell * zeta_node[i] * field(k, i) * field(k, i);
    }
    if (dims == 1)
    {
      for (int i = 0; i + 1 < nx; ++i)
      {
        const Point mid(g.coord(0, i) + 0.5 * h, 0.0);
        const double D = (field(k, i + 1) - field(k, i)) / h;
        const double um = 0.5 * (field(k, i) + field(k, i + 1));
        energy += cell * std::pow(zeta.value(mid, 1), p) * std::pow(std::abs(D), p);
        cut += cell * std::pow(um, p) * std::pow(zeta.gradient(mid, 1).norm(), p);
      }
      return;
    }
    for (int j = 0; j + 1 < ny; ++j)
    {
      for (int i = 0; i + 1 < nx; ++i)
      {
        const Point mid(g.coord(0, i) + 0.5 * h, g.coord(1, j) + 0.5 * h);
        auto u = [&](int a, int b) { return field(k, g.flat_index(a, b)); };
        const double dx0 = (u(i + 1, j) - u(i, j)) / h, dx1 = (u(i + 1, j + 1) - u(i, j + 1)) / h;
        const double dy0 = (u(i, j + 1) - u(i, j)) / h, dy1 = (u(i + 1, j + 1) - u(i + 1, j)) / h;
        const double g2 = 0.5 * (dx0 * dx0 + dx1 * dx1 + dy0 * dy0 + dy1 * dy1);
        const double um = 0.25 * (u(i, j) + u(i + 1, j) + u(i, j + 1) + u(i + 1, j + 1));
        energy += cell * std::pow(zeta.value(mid, 2), p) * std::pow(g2, 0.5 * p);
        cut += cell * std::pow(um, p) * std::pow(zeta.gradient(mid, 2).norm(), p);
      }
    }
  };

  CaccioppoliReport rep;
  std::vector<double> e(ks.size()), m(ks.size()), c(ks.size());
  for (std::size_t s = 0; s < ks.size(); ++s)
  {
    slice_terms(ks[s], e[s], m[s], c[s]);
    rep.sup_slice = std::max(rep.sup_slice, m[s]);
  }
  for (std::size_t s = 0; s + 1 < ks.size(); ++s)
  {
    const double w = 0.5 * (g.time(ks[s + 1]) - g.time(ks[s]));
    rep.energy += w * (e[s] + e[s + 1]);
    rep.cutoff_term += w * (c[s] + c[s + 1]);
  }
  rep.initial_slice = m.front();
  rep.lhs = rep.energy + rep.sup_slice;
  rep.rhs = rep.cutoff_term + rep.initial_slice;
  rep.bracket_difference = rep.cutoff_term + (m.back() - m.front());
  rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : (rep.lhs > 0.0 ? kInf : 0.0);
  return rep;
}

}  // namespace slowdiff
