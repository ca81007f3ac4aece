// Copyright 2026 The slowdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "slowdiff/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace slowdiff
{

BoundaryData BoundaryData::dirichlet(double c)
{
  return {BoundaryKind::Dirichlet, [c](double) { return c; }};
}

BoundaryData BoundaryData::dirichlet(std::function<double(double)> fn)
{
  if (!fn)
  {
    throw ConfigError("Dirichlet data needs a callable");
  }
  return {BoundaryKind::Dirichlet, std::move(fn)};
}

BoundaryData BoundaryData::series(std::vector<double> times, std::vector<double> values)
{
  if (times.empty() || times.size() != values.size())
  {
    throw ConfigError("boundary series needs matching, non-empty time and value arrays");
  }
  if (!std::is_sorted(times.begin(), times.end()))
  {
    throw ConfigError("boundary series times must be increasing");
  }
  auto data = std::make_shared<const std::pair<std::vector<double>, std::vector<double>>>(
      std::move(times), std::move(values));
  return {BoundaryKind::Dirichlet, [data](double t) {
            const auto &[ts, vs] = *data;
            if (t <= ts.front())
            {
              return vs.front();
            }
            if (t >= ts.back())
            {
              return vs.back();
            }
            const auto it = std::upper_bound(ts.begin(), ts.end(), t);
            const std::size_t k = static_cast<std::size_t>(it - ts.begin());
            const double w = (t - ts[k - 1]) / (ts[k] - ts[k - 1]);
            return (1.0 - w) * vs[k - 1] + w * vs[k];
          }};
}

BoundaryData BoundaryData::zero_flux()
{
  return {BoundaryKind::ZeroFlux, {}};
}

double BoundaryData::at(double t) const
{
  return kind == BoundaryKind::Dirichlet ? value(t) : std::numeric_limits<double>::quiet_NaN();
}

void EvolutionProblem::validate() const
{
  params.validate(equation);
  grid.validate();
  if (grid.kind == GridKind::Box2D)
  {
    throw ConfigError("evolution runs on interval or radial grids");
  }
  if (initial.size() != grid.space_size())
  {
    throw ConfigError("initial data size does not match the grid");
  }
  if (!initial.allFinite())
  {
    throw ConfigError("initial data must be finite");
  }
  if (initial.size() > 0 && initial.minCoeff() < 0.0)
  {
    throw ContractError("initial data must be non-negative");
  }
  if (!(cfl > 0.0 && cfl <= 1.0))
  {
    throw ConfigError("cfl safety must lie in (0, 1]");
  }
  if (grid.kind == GridKind::Interval && left.kind == BoundaryKind::Dirichlet && !left.value)
  {
    throw ConfigError("left Dirichlet data missing");
  }
  if (right.kind == BoundaryKind::Dirichlet && !right.value)
  {
    throw ConfigError("right Dirichlet data missing");
  }
  if (held)
  {
    for (int i : held->nodes)
    {
      if (i < 0 || i >= grid.space_size())
      {
        throw ConfigError("held node out of range");
      }
    }
    if (!held->nodes.empty() && !held->value)
    {
      throw ConfigError("held region needs a value function");
    }
  }
}

Stepper::Stepper(const EvolutionProblem &problem) : problem_(problem)
{
  problem_.validate();
  build_geometry();
  t_ = problem_.grid.t0;
  u_ = problem_.initial;
  impose(u_, t_);
}

void Stepper::build_geometry()
{
  const Grid &g = problem_.grid;
  const int N = g.counts[0];
  const double h = g.h;
  fixed_.assign(N, 0);
  hidden_.assign(N, 0);
  volume_.resize(N);
  face_.resize(N - 1);
  const bool radial = g.kind == GridKind::Radial;
  const int n = radial ? g.radial_dim : 1;
  left_flux_ = !radial && problem_.left.kind == BoundaryKind::Dirichlet;
  right_flux_ = problem_.right.kind == BoundaryKind::Dirichlet;
  for (int i = 0; i < N; ++i)
  {
    const double r = g.coord(0, i);
    double a = r - 0.5 * h, b = r + 0.5 * h;
    if (i == 0)
    {
      a = r;
    }
    if (i == N - 1)
    {
      b = r;
    }
    volume_[i] = radial ? (std::pow(b, n) - std::pow(std::max(a, 0.0), n)) / n : b - a;
  }
  for (int i = 0; i + 1 < N; ++i)
  {
    face_[i] = radial ? std::pow(g.coord(0, i) + 0.5 * h, n - 1) : 1.0;
  }
  if (left_flux_)
  {
    fixed_[0] = 1;
  }
  if (right_flux_)
  {
    fixed_[N - 1] = 1;
  }
  if (problem_.held)
  {
    for (int i : problem_.held->nodes)
    {
      fixed_[i] = 1;
    }
    for (int i : problem_.held->hidden)
    {
      fixed_[i] = 1;
      hidden_[i] = 1;
    }
  }
}

Eigen::VectorXd Stepper::prescribed_at(double t) const
{
  const int N = problem_.grid.counts[0];
  Eigen::VectorXd d = Eigen::VectorXd::Constant(N, std::numeric_limits<double>::quiet_NaN());
  if (left_flux_)
  {
    d[0] = problem_.left.at(t);
  }
  if (right_flux_)
  {
    d[N - 1] = problem_.right.at(t);
  }
  if (problem_.held)
  {
    for (int i : problem_.held->nodes)
    {
      d[i] = problem_.held->value(problem_.grid.node(i), t);
    }
    for (int i : problem_.held->hidden)
    {
      d[i] = 0.0;
    }
  }
  return d;
}

void Stepper::impose(Eigen::VectorXd &u, double t) const
{
  const Eigen::VectorXd d = prescribed_at(t);
  for (int i = 0; i < d.size(); ++i)
  {
    if (fixed_[i])
    {
      u[i] = d[i];
    }
  }
}

namespace
{

double phi(double d, double p)
{
  return std::pow(std::abs(d), p - 2.0) * d;
}

}  // namespace

double Stepper::stable_dt() const
{
  const int N = static_cast<int>(u_.size());
  const double h = problem_.grid.h;
  const bool pme = problem_.equation == Equation::PME;
  const double p = problem_.params.p;
  const double m = pme ? *problem_.params.m : 1.0;
  double rate = 0.0;
  for (int i = 0; i < N; ++i)
  {
    if (fixed_[i])
    {
      continue;
    }
    const bool has_left = i > 0;
    const bool has_right = i + 1 < N;
    const double area = (has_left ? face_[i - 1] : 0.0) + (has_right ? face_[i] : 0.0);
    double kappa = 0.0;
    if (pme)
    {
      kappa = m * std::pow(std::max(u_[i], 0.0), m - 1.0);
    }
    else
    {
      double dmax = 0.0;
      if (has_left)
      {
        dmax = std::max(dmax, std::abs(u_[i] - u_[i - 1]) / h);
      }
      if (has_right)
      {
        dmax = std::max(dmax, std::abs(u_[i + 1] - u_[i]) / h);
      }
      kappa = (p - 1.0) * std::pow(dmax, p - 2.0);
    }
    rate = std::max(rate, area * kappa / (volume_[i] * h));
  }
  return rate > 0.0 ? problem_.cfl / rate : std::numeric_limits<double>::infinity();
}

void Stepper::advance(double dt, double time_after)
{
  const int N = static_cast<int>(u_.size());
  const double h = problem_.grid.h;
  const bool pme = problem_.equation == Equation::PME;
  const double p = problem_.params.p;
  const double m = pme ? *problem_.params.m : 1.0;
  Eigen::VectorXd flux(N - 1);
  for (int i = 0; i + 1 < N; ++i)
  {
    if (pme)
    {
      flux[i] = (std::pow(std::max(u_[i + 1], 0.0), m) - std::pow(std::max(u_[i], 0.0), m)) / h;
    }
    else
    {
      flux[i] = phi((u_[i + 1] - u_[i]) / h, p);
    }
    flux[i] *= face_[i];
  }
  Eigen::VectorXd next = u_;
  for (int i = 0; i < N; ++i)
  {
    if (fixed_[i])
    {
      continue;
    }
    const double in = i + 1 < N ? flux[i] : 0.0;
    const double out = i > 0 ? flux[i - 1] : 0.0;
    next[i] = u_[i] + dt / volume_[i] * (in - out);
  }
  impose(next, time_after);
  u_ = std::move(next);
  t_ = time_after;
}

double Stepper::solution_max() const
{
  double mx = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < u_.size(); ++i)
  {
    if (!hidden_[i])
    {
      mx = std::max(mx, u_[i]);
    }
  }
  return mx;
}

Eigen::VectorXd Stepper::output_state() const
{
  Eigen::VectorXd out = u_;
  for (int i = 0; i < out.size(); ++i)
  {
    if (hidden_[i])
    {
      out[i] = 0.0;
    }
  }
  return out;
}

namespace
{

double data_scale(const EvolutionProblem &problem, const Stepper &stepper)
{
  double s = problem.initial.cwiseAbs().maxCoeff();
  const Grid &g = problem.grid;
  for (int k = 0; k < g.time_size(); ++k)
  {
    const Eigen::VectorXd d = stepper.prescribed_at(g.time(k));
    for (int i = 0; i < d.size(); ++i)
    {
      if (std::isfinite(d[i]))
      {
        s = std::max(s, std::abs(d[i]));
      }
    }
  }
  return s;
}

// True if prescribed data at the end of the step jumps by more than the factor.
bool data_jumps(const Eigen::VectorXd &before, const Eigen::VectorXd &after, double factor,
                double reference)
{
  for (int i = 0; i < before.size(); ++i)
  {
    if (std::isnan(after[i]))
    {
      continue;
    }
    const double base = std::max(std::isnan(before[i]) ? 0.0 : std::abs(before[i]), reference);
    if (!(std::abs(after[i]) <= factor * base))
    {
      return true;
    }
  }
  return false;
}

}  // namespace

SolveReport evolve(const EvolutionProblem &problem)
{
  Stepper stepper(problem);
  const Grid &g = problem.grid;
  double threshold = 0.0;
  if (problem.blow_up_threshold)
  {
    threshold = *problem.blow_up_threshold;
  }
  else
  {
    const double scale = data_scale(problem, stepper);
    threshold = 1e6 * (scale > 0.0 ? scale : 1.0);
  }
  if (!(threshold > 0.0))
  {
    throw ConfigError("blow-up threshold must be positive");
  }
  const double reference = 1e-3 * threshold;

  std::vector<Eigen::VectorXd> slices{stepper.output_state()};
  SolveReport rep{ScalarField(g.with_time(g.t0, g.dt, 0),
                              Eigen::ArrayXXd::Zero(1, g.space_size())),
                  {}, {}, {}, false, {}, 0.0, 0};
  rep.threshold = threshold;

  if (stepper.solution_max() > threshold)
  {
    rep.blow_up_flag = true;
    rep.blow_up_time = g.t0;
  }
  for (int k = 1; k <= g.steps && !rep.blow_up_flag; ++k)
  {
    const double target = g.time(k);
    while (stepper.time() < target && !rep.blow_up_flag)
    {
      const double t = stepper.time();
      const double stable = stepper.stable_dt();
      double dt = std::min(stable, target - t);
      if (stable < problem.dt_min && target - t > problem.dt_min)
      {
        throw StiffnessError("stable time step underflow at t = " + std::to_string(t));
      }
      const Eigen::VectorXd before = stepper.prescribed_at(t);
      bool forced = false;
      while (true)
      {
        const double t_next = dt >= target - t ? target : t + dt;
        if (!data_jumps(before, stepper.prescribed_at(t_next), problem.data_jump_factor,
                        reference))
        {
          break;
        }
        if (dt <= problem.dt_min)
        {
          forced = true;
          break;
        }
        dt = std::max(0.5 * dt, problem.dt_min);
      }
      const double t_next = dt >= target - t ? target : t + dt;
      stepper.advance(t_next - t, t_next);
      if (forced)
      {
        ++rep.forced_steps;
      }
      if (!stepper.state().allFinite())
      {
        throw NumericError("non-finite values at t = " + std::to_string(t_next));
      }
      const double mx = stepper.solution_max();
      rep.step_times.push_back(t_next);
      rep.max_trace.push_back(mx);
      rep.dt_trace.push_back(t_next - t);
      if (mx > threshold)
      {
        rep.blow_up_flag = true;
        rep.blow_up_time = t_next;
      }
    }
    if (stepper.time() >= target)
    {
      slices.push_back(stepper.output_state());
    }
  }

  const int stored = static_cast<int>(slices.size());
  Eigen::ArrayXXd values(stored, g.space_size());
  for (int k = 0; k < stored; ++k)
  {
    values.row(k) = slices[k].transpose().array();
  }
  rep.field = ScalarField(g.with_time(g.t0, g.dt, stored - 1), std::move(values));
  return rep;
}

namespace
{

struct RingLayout
{
  Grid grid;
  int inner_left = 0, inner_right = 0;
};

RingLayout ring_layout(const RingSpec &spec)
{
  if (!(spec.l > 0.0) || spec.cells < 4 || spec.cells % 4 != 0)
  {
    throw ConfigError("ring needs l > 0 and a cell count divisible by 4");
  }
  if (!(spec.t_end > 0.0) || spec.output_steps < 1)
  {
    throw ConfigError("ring needs a positive horizon and output steps");
  }
  if (!spec.inner)
  {
    throw ConfigError("ring needs an inner trace");
  }
  RingLayout lay;
  lay.grid = Grid::interval_span(-2.0 * spec.l, 2.0 * spec.l, spec.cells, 0.0, spec.t_end,
                                 spec.output_steps);
  lay.inner_left = spec.cells / 4;
  lay.inner_right = 3 * spec.cells / 4;
  return lay;
}

double ring_trace(const RingSpec &spec, const Point &x, double t)
{
  if (t <= spec.delta)
  {
    return 0.0;
  }
  return spec.inner(x, t);
}

}  // namespace

double ring_default_threshold(const RingSpec &spec)
{
  const RingLayout lay = ring_layout(spec);
  std::vector<double> samples;
  for (int k = 0; k < lay.grid.time_size(); ++k)
  {
    for (int i : {lay.inner_left, lay.inner_right})
    {
      const double v = ring_trace(spec, lay.grid.node(i), lay.grid.time(k));
      if (v > 0.0 && std::isfinite(v))
      {
        samples.push_back(v);
      }
    }
  }
  if (samples.empty())
  {
    return 1e3;
  }
  const std::size_t mid = samples.size() / 2;
  std::nth_element(samples.begin(), samples.begin() + static_cast<long>(mid), samples.end());
  return 1e3 * samples[mid];
}

SolveReport solve_ring(const RingSpec &spec)
{
  const RingLayout lay = ring_layout(spec);
  EvolutionProblem prob;
  prob.params = spec.params;
  prob.equation = spec.equation;
  prob.grid = lay.grid;
  prob.initial = Eigen::VectorXd::Zero(lay.grid.space_size());
  prob.left = BoundaryData::dirichlet(0.0);
  prob.right = BoundaryData::dirichlet(0.0);
  prob.cfl = spec.cfl;
  HeldRegion held;
  held.nodes = {lay.inner_left, lay.inner_right};
  for (int i = lay.inner_left + 1; i < lay.inner_right; ++i)
  {
    held.hidden.push_back(i);
  }
  const RingSpec copy = spec;
  held.value = [copy](const Point &x, double t) { return ring_trace(copy, x, t); };
  prob.held = std::move(held);
  prob.blow_up_threshold = spec.threshold ? *spec.threshold : ring_default_threshold(spec);
  return evolve(prob);
}

ComparisonReport comparison_check(const EvolutionProblem &a, const EvolutionProblem &b,
                                  double slack)
{
  a.validate();
  b.validate();
  const Grid &g = a.grid;
  if (g.kind != b.grid.kind || g.counts != b.grid.counts || g.h != b.grid.h || g.t0 != b.grid.t0 ||
      g.dt != b.grid.dt || g.steps != b.grid.steps || a.equation != b.equation)
  {
    throw ContractError("comparison needs problems on the same grid and equation");
  }
  if (a.left.kind != b.left.kind || a.right.kind != b.right.kind ||
      a.held.has_value() != b.held.has_value())
  {
    throw ContractError("comparison needs matching boundary types");
  }
  if ((a.initial.array() > b.initial.array()).any())
  {
    throw ContractError("initial data of A exceed those of B");
  }
  Stepper sa(a), sb(b);
  for (int k = 0; k < g.time_size(); ++k)
  {
    const Eigen::VectorXd da = sa.prescribed_at(g.time(k)), db = sb.prescribed_at(g.time(k));
    for (int i = 0; i < da.size(); ++i)
    {
      if (std::isfinite(da[i]) && std::isfinite(db[i]) && da[i] > db[i])
      {
        throw ContractError("boundary data of A exceed those of B");
      }
    }
  }

  ComparisonReport rep;
  rep.max_violation = (sa.state() - sb.state()).maxCoeff();
  auto record = [&]() {
    const Eigen::VectorXd diff = sa.state() - sb.state();
    rep.max_violation = std::max(rep.max_violation, diff.maxCoeff());
    rep.times.push_back(sa.time());
    rep.max_gap.push_back((-diff).maxCoeff());
    if (sa.state().minCoeff() < 0.0 || sb.state().minCoeff() < 0.0)
    {
      rep.min_positive = false;
    }
  };
  record();
  for (int k = 1; k <= g.steps; ++k)
  {
    const double target = g.time(k);
    while (sa.time() < target)
    {
      const double t = sa.time();
      const double stable = std::min(sa.stable_dt(), sb.stable_dt());
      if (stable < a.dt_min && target - t > a.dt_min)
      {
        throw StiffnessError("stable time step underflow in comparison run");
      }
      const double t_next = stable >= target - t ? target : t + stable;
      sa.advance(t_next - t, t_next);
      sb.advance(t_next - t, t_next);
      if (!sa.state().allFinite() || !sb.state().allFinite())
      {
        throw NumericError("non-finite values in comparison run");
      }
      record();
    }
  }
  rep.ordered = rep.max_violation <= slack;
  return rep;
}

}  // namespace slowdiff
