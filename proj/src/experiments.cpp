// Copyright 2026 The slowdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "slowdiff/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "slowdiff/diagnostics.hpp"
#include "slowdiff/eigenfunctions.hpp"
#include "slowdiff/evolution.hpp"
#include "slowdiff/exact_solutions.hpp"
#include "slowdiff/pme.hpp"
#include "slowdiff/regularization.hpp"

namespace slowdiff
{

namespace
{

double parse_double(const std::string &key, const std::string &v)
{
  try
  {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size())
    {
      throw std::invalid_argument(v);
    }
    return d;
  }
  catch (const std::exception &)
  {
    throw ConfigError("config key " + key + ": expected a number, got '" + v + "'");
  }
}

long long parse_integer(const std::string &key, const std::string &v)
{
  try
  {
    std::size_t used = 0;
    const long long i = std::stoll(v, &used);
    if (used != v.size())
    {
      throw std::invalid_argument(v);
    }
    return i;
  }
  catch (const std::exception &)
  {
    throw ConfigError("config key " + key + ": expected an integer, got '" + v + "'");
  }
}

}  // namespace

void ExperimentConfig::set(const std::string &key, const std::string &value)
{
  auto integer = [&] {
    const long long i = parse_integer(key, value);
    if (i < 0 || i > 1'000'000'000)
    {
      throw ConfigError("config key " + key + ": out of range");
    }
    return static_cast<int>(i);
  };
  if (key == "experiment")
  {
    experiment = value;
  }
  else if (key == "equation")
  {
    if (value == "plaplace")
    {
      equation = Equation::PLaplace;
    }
    else if (value == "pme")
    {
      equation = Equation::PME;
    }
    else
    {
      throw ConfigError("config key equation: expected plaplace or pme");
    }
  }
  else if (key == "p")
  {
    p = parse_double(key, value);
  }
  else if (key == "m")
  {
    m = parse_double(key, value);
  }
  else if (key == "C")
  {
    C = parse_double(key, value);
  }
  else if (key == "L")
  {
    L = parse_double(key, value);
  }
  else if (key == "t_end")
  {
    t_end = parse_double(key, value);
  }
  else if (key == "cfl")
  {
    cfl = parse_double(key, value);
  }
  else if (key == "n")
  {
    n = integer();
  }
  else if (key == "grid")
  {
    grid = integer();
  }
  else if (key == "samples")
  {
    samples = integer();
  }
  else if (key == "pairs")
  {
    pairs = integer();
  }
  else if (key == "seed")
  {
    const long long s = parse_integer(key, value);
    if (s < 0)
    {
      throw ConfigError("config key seed: expected a non-negative integer");
    }
    seed = static_cast<std::uint64_t>(s);
  }
  else if (key == "out")
  {
    out = value;
  }
  else if (key == "format")
  {
    format = parse_format(value);
  }
  else
  {
    throw ConfigError("unknown config key " + key);
  }
}

ExperimentConfig ExperimentConfig::from_key_values(const std::map<std::string, std::string> &kv)
{
  ExperimentConfig c;
  for (const auto &[k, v] : kv)
  {
    c.set(k, v);
  }
  if (kv.count("experiment") == 0)
  {
    throw ConfigError("config needs an experiment key");
  }
  return c;
}

bool ExperimentResult::passed() const
{
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const Check &c) { return c.passed; });
}

std::string ExperimentResult::digest() const
{
  std::string s;
  for (const Check &c : checks)
  {
    if (!s.empty())
    {
      s += "; ";
    }
    s += c.name + "=" + (c.passed ? "PASS" : "FAIL");
    if (!c.detail.empty())
    {
      s += " (" + c.detail + ")";
    }
  }
  return s;
}

namespace
{

std::string fmt(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

void check(ExperimentResult &r, std::string name, bool ok, std::string detail)
{
  r.checks.push_back({std::move(name), ok, std::move(detail)});
}

// Least-squares slope of log y against log x.
double log_slope(const std::vector<double> &x, const std::vector<double> &y)
{
  const int n = static_cast<int>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i)
  {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double rel(double a, double b)
{
  return std::abs(a - b) / std::abs(b);
}

Table shell_table(const std::string &name)
{
  return {name, {"field", "q", "shell_index", "scale", "integral", "verdict"}, {}};
}

void add_shells(Table &t, const std::string &field, const SummabilityReport &r)
{
  for (const ShellIntegral &s : r.shells)
  {
    t.add({field, r.q, static_cast<long long>(s.index), s.scale, s.value,
           std::string(to_string(r.verdict))});
  }
}

std::string verdict_detail(const SummabilityReport &r)
{
  return "q=" + fmt(r.q) + " " + to_string(r.verdict) + " tail=" + fmt(r.tail_ratio);
}

// Trapezoid mass on a uniform interval grid.
double interval_mass(const ScalarField &f, int k)
{
  const Grid &g = f.grid();
  double s = 0.0;
  for (int i = 0; i < g.space_size(); ++i)
  {
    s += (i == 0 || i == g.space_size() - 1 ? 0.5 : 1.0) * f(k, i);
  }
  return s * g.h;
}

MediumParams plaplace_params(const ExperimentConfig &c, double p_default = 3.0)
{
  MediumParams mp = MediumParams::plaplace(c.p.value_or(p_default), c.n.value_or(1));
  mp.validate(Equation::PLaplace);
  return mp;
}

MediumParams pme_params(const ExperimentConfig &c, double m_default = 2.0)
{
  MediumParams mp = MediumParams::pme(c.m.value_or(m_default), c.n.value_or(1));
  mp.validate(Equation::PME);
  return mp;
}

void require_1d(const MediumParams &mp, const std::string &name)
{
  if (mp.n != 1)
  {
    throw ConfigError(name + " runs in one spatial dimension (n = 1)");
  }
}

SolveReport evolve_barenblatt(const BarenblattSpec &b, double X, int cells, double t_start,
                              double t_last, int steps, double cfl)
{
  EvolutionProblem pr;
  pr.params = b.params;
  pr.grid = Grid::interval_span(-X, X, cells, t_start, t_last, steps);
  pr.cfl = cfl;
  pr.initial.resize(cells + 1);
  for (int i = 0; i <= cells; ++i)
  {
    pr.initial[i] = barenblatt_eval(b, pr.grid.node(i), t_start);
  }
  pr.left = BoundaryData::dirichlet([b, X](double t) { return barenblatt_eval(b, Point(-X, 0), t); });
  pr.right = BoundaryData::dirichlet([b, X](double t) { return barenblatt_eval(b, Point(X, 0), t); });
  return evolve(pr);
}

// Criterion 1.
ExperimentResult barenblatt_experiment(const ExperimentConfig &c)
{
  ExperimentResult r;
  BarenblattSpec b;
  b.params = plaplace_params(c);
  require_1d(b.params, "barenblatt");
  b.C = c.C.value_or(1.0);
  b.validate();
  const int N = c.grid.value_or(512);
  const double t_start = 0.5, t_cmp = 1.0, t_last = c.t_end.value_or(2.0);
  if (!(t_last >= t_cmp))
  {
    throw ConfigError("barenblatt needs t_end >= 1");
  }
  const double cfl = c.cfl.value_or(0.9);
  const double X = std::max(4.0, 1.1 * barenblatt_support_radius(b, t_last));
  const int steps = static_cast<int>(std::lround((t_last - t_start) / 0.05));
  const SolveReport rep = evolve_barenblatt(b, X, N, t_start, t_last, std::max(steps, 1), cfl);
  const ScalarField &f = rep.field;
  const Grid &g = f.grid();

  int k_cmp = 0;
  for (int k = 0; k < g.time_size(); ++k)
  {
    if (std::abs(g.time(k) - t_cmp) < std::abs(g.time(k_cmp) - t_cmp))
    {
      k_cmp = k;
    }
  }
  Table profile{"profile", {"x", "numerical", "exact"}, {}};
  double err = 0.0, peak = 0.0;
  for (int i = 0; i < g.space_size(); ++i)
  {
    const double e = barenblatt_eval(b, g.node(i), g.time(k_cmp));
    profile.add({g.node(i)[0], f(k_cmp, i), e});
    err = std::max(err, std::abs(f(k_cmp, i) - e));
    peak = std::max(peak, e);
  }
  const double rel_sup = err / peak;
  check(r, "sup_error_t1", rel_sup <= 0.01, "relative sup " + fmt(rel_sup) + " <= 0.01");

  Table mass{"mass", {"t", "discrete_mass", "exact_mass"}, {}};
  const double m0 = interval_mass(f, 0);
  double drift = 0.0, vs_exact = 0.0;
  for (int k = 0; k < g.time_size(); ++k)
  {
    const double mk = interval_mass(f, k), me = barenblatt_mass(b, g.time(k));
    mass.add({g.time(k), mk, me});
    drift = std::max(drift, rel(mk, m0));
    vs_exact = std::max(vs_exact, rel(mk, me));
  }
  check(r, "mass_constant", drift <= 0.01, "max drift " + fmt(drift) + " <= 0.01");
  check(r, "mass_exact", vs_exact <= 0.01, "max deviation from closed form " + fmt(vs_exact));

  // Strong residual of the closed form on refined stencils over [0.5, 1]; nodes within 4h
  // of the moving front or the origin line are excluded, window |x| >= 0.25.
  Table resid{"residual", {"cells", "h", "sup_away", "order_away", "sup_with_front", "order_with_front"}, {}};
  const double Xr = 0.9 * barenblatt_support_radius(b, t_cmp);
  double prev = 0.0, prev_front = 0.0, min_order = 1e300;
  bool decreasing = true;
  for (int cells : {64, 128, 256, 512})
  {
    const double h = 2.0 * Xr / cells;
    const int nt = static_cast<int>(std::ceil((t_cmp - t_start) / (0.5 * h * h)));
    const Grid sg = Grid::interval_span(-Xr, Xr, cells, t_start, t_cmp, nt);
    const ResidualReport rr = pde_residual(barenblatt_function(b), sg, b.params, Equation::PLaplace,
                                           SingularSet::space_time_point(b.x0, b.t0));
    double s = 0.0, sf = 0.0;
    for (int k = 0; k < sg.time_size(); ++k)
    {
      const double R = barenblatt_support_radius(b, sg.time(k));
      for (int i = 0; i < sg.space_size(); ++i)
      {
        const double x = std::abs(sg.node(i)[0]);
        if (rr.excluded(k, i) || x < 0.25)
        {
          continue;
        }
        const double v = std::abs(rr.residual(k, i));
        sf = std::max(sf, v);
        if (std::abs(x - R) > 4.0 * h)
        {
          s = std::max(s, v);
        }
      }
    }
    const double order = prev > 0.0 ? std::log2(prev / s) : 0.0;
    const double order_f = prev_front > 0.0 ? std::log2(prev_front / sf) : 0.0;
    if (prev > 0.0)
    {
      min_order = std::min(min_order, order);
      decreasing = decreasing && s < prev;
    }
    resid.add({static_cast<long long>(cells), h, s, order, sf, order_f});
    prev = s;
    prev_front = sf;
  }
  check(r, "residual_order", decreasing && min_order >= 1.0,
        "min measured order " + fmt(min_order) + " >= 1");

  r.tables = {profile, mass, resid};
  r.summary = {{"relative_sup_error", rel_sup},
               {"mass_drift", drift},
               {"mass_vs_closed_form", vs_exact},
               {"residual_min_order", min_order},
               {"internal_steps", static_cast<long long>(rep.internal_steps())}};
  return r;
}

// Criterion 2.
ExperimentResult sharp_exponents_experiment(const ExperimentConfig &c)
{
  ExperimentResult r;
  BarenblattSpec b;
  b.params = plaplace_params(c);
  b.C = c.C.value_or(1.0);
  b.validate();
  const int dims = b.params.n;
  if (dims > 2)
  {
    throw ConfigError("sharp_exponents shells run in one or two dimensions");
  }
  const DerivedConstants dc = derived_constants(b.params);
  const SingularHint hint = SingularHint::point(b.x0, b.t0, 1.0, 1.0, dc.lambda);
  const SpaceTimeFunction v = barenblatt_function(b);
  const SpaceTimeFunction grad = [b](const Point &x, double t) {
    return barenblatt_gradient_norm(b, x, t);
  };
  Table t = shell_table("shells");
  auto run = [&](const SpaceTimeFunction &fn, const std::string &field, double q, Verdict want,
                 const std::string &name) {
    const SummabilityReport rep = classify_summability(fn, dims, hint, q);
    add_shells(t, field, rep);
    check(r, name, rep.verdict == want, verdict_detail(rep));
    r.summary.push_back({name + "_tail_ratio", rep.tail_ratio});
  };
  run(v, "value", dc.q_crit - 0.5, Verdict::Finite, "value_below_qcrit");
  run(v, "value", dc.q_crit, Verdict::Divergent, "value_at_qcrit");
  run(v, "value", dc.class_threshold, Verdict::Finite, "value_at_class_threshold");
  run(grad, "gradient", dc.qgrad_crit - 0.2, Verdict::Finite, "gradient_below_qgrad");
  run(grad, "gradient", dc.qgrad_crit, Verdict::Divergent, "gradient_at_qgrad");
  r.tables = {t};
  r.summary.insert(r.summary.begin(), {{"q_crit", dc.q_crit}, {"qgrad_crit", dc.qgrad_crit},
                                       {"lambda", dc.lambda}});
  return r;
}

struct ClassMSetup
{
  double L;
  double t0;
  double dt;
  Grid sampling;
  double core_min;
};

// Shared by criteria 3 and 10: separable field on [-L/2, L/2].
void class_m_checks(ExperimentResult &r, const SpaceTimeFunction &v, const ClassMSetup &s, const MediumParams &mp, Equation eq,
                    const std::string &prefix, Table &t)
{
  const DerivedConstants dc = derived_constants(mp, eq);
  SummabilityOptions so;
  so.spatial_nodes = s.sampling.spatial();
  const double T = s.sampling.t_end();
  const SingularHint hint = SingularHint::time_slice(
      s.t0, Cylinder::interval(-0.5 * s.L, 0.5 * s.L, s.sampling.t0, T), 0.5 * (T - s.t0));
  const SummabilityReport at = classify_summability(v, 1, hint, dc.class_threshold, so);
  const SummabilityReport half = classify_summability(v, 1, hint, 0.5 * dc.class_threshold, so);
  add_shells(t, prefix + "separable", at);
  add_shells(t, prefix + "separable", half);
  check(r, prefix + "divergent_at_threshold", at.verdict == Verdict::Divergent, verdict_detail(at));
  check(r, prefix + "finite_at_half_threshold", half.verdict == Verdict::Finite, verdict_detail(half));

  const ClassVerdict cv = classify_field(v, s.sampling, mp, eq);
  const double t0d = cv.t0_detected.value_or(std::nan(""));
  check(r, prefix + "label_M", cv.label == ClassLabel::M, std::string("label ") + to_string(cv.label));
  check(r, prefix + "t0_detected", cv.t0_detected && std::abs(t0d - s.t0) <= 5.0 * s.dt,
        "|t0 - " + fmt(s.t0) + "| = " + fmt(std::abs(t0d - s.t0)) + " <= 5 dt = " + fmt(5 * s.dt));
  const double floor_err = rel(cv.minorant_floor, s.core_min);
  check(r, prefix + "minorant_floor", floor_err <= 0.05,
        "floor " + fmt(cv.minorant_floor) + " vs min_K " + fmt(s.core_min) + ", rel " + fmt(floor_err));
  r.summary.push_back({prefix + "label", std::string(to_string(cv.label))});
  r.summary.push_back({prefix + "t0_detected", t0d});
  r.summary.push_back({prefix + "minorant_floor", cv.minorant_floor});
  r.summary.push_back({prefix + "core_min", s.core_min});
}

ClassMSetup class_m_setup(const EigenResult &e, double L, int cells, double t0, double T, int steps)
{
  ClassMSetup s;
  s.L = L;
  s.t0 = t0;
  s.sampling = Grid::interval_span(-0.5 * L, 0.5 * L, cells, 0.0, T, steps);
  s.dt = s.sampling.dt;
  s.core_min = 1e300;
  for (int i = 0; i < s.sampling.space_size(); ++i)
  {
    const Point x = s.sampling.node(i);
    if (std::abs(x[0]) <= 0.25 * L + 1e-12 * s.sampling.h)
    {
      s.core_min = std::min(s.core_min, e.value_at(x));
    }
  }
  return s;
}

// Criterion 3.
ExperimentResult class_m_experiment(const ExperimentConfig &c)
{
  ExperimentResult r;
  const MediumParams mp = plaplace_params(c);
  require_1d(mp, "class_m");
  const double L = c.L.value_or(2.0);
  const int N = c.grid.value_or(512);
  const double T = c.t_end.value_or(1.0);
  const double t0 = 0.3 * T;
  SeparableSpec spec{minimize_quotient(Grid::interval_span(-0.5 * L, 0.5 * L, N), mp, Equation::PLaplace), t0};
  const ClassMSetup s = class_m_setup(spec.eigen, L, N, t0, T, 200);
  Table t = shell_table("shells");
  class_m_checks(r, separable_function(spec), s, mp, Equation::PLaplace, "", t);
  r.summary.push_back({"boundary_bounded", static_cast<long long>(boundary_boundedness_check(separable_function(spec), s.sampling))});
  r.tables = {t};
  return r;
}

// Criterion 4.
ExperimentResult eigen_oracle_experiment(const ExperimentConfig &c)
{
  ExperimentResult r;
  const std::vector<double> ps = c.p ? std::vector<double>{*c.p} : std::vector<double>{3.0, 4.0, 6.0};
  const double L0 = c.L.value_or(1.0);
  const int N = c.grid.value_or(1024);
  const std::vector<double> Ls = {0.5, 1.0, 2.0, 4.0};
  Table agree{"oracle", {"p", "L", "solver_M", "oracle_M", "relative_error", "profile_sup_error"}, {}};
  Table scaling{"scaling", {"p", "L", "solver_M", "solver_slope0", "oracle_M", "oracle_slope0"}, {}};
  Table beta{"beta", {"p", "shape_integral", "beta_half", "difference"}, {}};
  for (double p : ps)
  {
    const MediumParams mp = MediumParams::plaplace(p);
    mp.validate(Equation::PLaplace);
    const EigenResult e = minimize_quotient(Grid::interval_span(0.0, L0, N), mp, Equation::PLaplace);
    const FirstIntegral1D o = first_integral_oracle(p, L0);
    const Eigen::VectorXd prof = profile_from_first_integral(p, L0, N);
    const double err = rel(e.max(), o.M);
    const double prof_err = (e.U - prof).cwiseAbs().maxCoeff() / o.M;
    agree.add({p, L0, e.max(), o.M, err, prof_err});
    check(r, "max_agreement_p" + fmt(p), err <= 0.005, "rel " + fmt(err) + " <= 0.005");

    std::vector<double> Ms, slopes;
    for (double L : Ls)
    {
      const EigenResult el = minimize_quotient(Grid::interval_span(0.0, L, N), mp, Equation::PLaplace);
      const FirstIntegral1D ol = first_integral_oracle(p, L);
      const double slope = (el.U[1] - el.U[0]) / el.grid.h;
      Ms.push_back(el.max());
      slopes.push_back(slope);
      scaling.add({p, L, el.max(), slope, ol.M, ol.slope0});
    }
    const double eM = log_slope(Ls, Ms), eS = log_slope(Ls, slopes);
    const double wantM = p / (p - 2.0), wantS = 2.0 / (p - 2.0);
    check(r, "max_exponent_p" + fmt(p), rel(eM, wantM) <= 0.01,
          "fit " + fmt(eM) + " vs " + fmt(wantM));
    check(r, "slope_exponent_p" + fmt(p), rel(eS, wantS) <= 0.01,
          "fit " + fmt(eS) + " vs " + fmt(wantS));
    const double b = 0.5 * std::beta(0.5, 1.0 - 1.0 / p);
    const double d = std::abs(o.shape_integral - b);
    beta.add({p, o.shape_integral, b, d});
    check(r, "beta_identity_p" + fmt(p), d <= 1e-8, "|diff| " + fmt(d) + " <= 1e-8");
    r.summary.push_back({"p" + fmt(p) + "_solver_M", e.max()});
    r.summary.push_back({"p" + fmt(p) + "_oracle_M", o.M});
    r.summary.push_back({"p" + fmt(p) + "_max_exponent", eM});
    r.summary.push_back({"p" + fmt(p) + "_slope_exponent", eS});
  }
  r.tables = {agree, scaling, beta};
  return r;
}

// Criterion 5.
ExperimentResult ring_probe_experiment(const ExperimentConfig &c)
{
  ExperimentResult r;
  const MediumParams mp = plaplace_params(c);
  require_1d(mp, "ring_probe");
  const double L = c.L.value_or(2.0);
  const double T = c.t_end.value_or(1.0);
  const double t0 = 0.5 * T;
  const int cells = c.grid.value_or(256);
  SeparableSpec spec{minimize_quotient(Grid::interval_span(-0.5 * L, 0.5 * L, 512), mp, Equation::PLaplace), t0};

  RingSpec ring;
  ring.l = 0.25 * L;
  ring.params = mp;
  ring.cells = cells;
  ring.t_end = T;
  ring.output_steps = 200;
  ring.cfl = c.cfl.value_or(0.9);
  ring.inner = separable_function(spec);
  const double dt = T / ring.output_steps;

  Table t{"probe", {"case", "threshold", "t_end", "blow_up", "blow_up_time", "outer_sup"}, {}};
  auto outer_sup = [&](const ScalarField &f) {
    double s = 0.0;
    for (int k = 0; k < f.grid().time_size(); ++k)
    {
      for (int i = 0; i < f.grid().space_size(); ++i)
      {
        if (std::abs(f.grid().node(i)[0]) > ring.l * (1.0 + 1e-12))
        {
          s = std::max(s, f(k, i));
        }
      }
    }
    return s;
  };

  const SolveReport a = solve_ring(ring);
  const double ta = a.blow_up_time.value_or(std::nan(""));
  t.add({std::string("separable"), a.threshold, T, static_cast<long long>(a.blow_up_flag), ta, outer_sup(a.field)});
  check(r, "blow_up_flagged", a.blow_up_flag && std::abs(ta - t0) <= 5.0 * dt,
        "|t - t0| = " + fmt(std::abs(ta - t0)) + " <= 5 dt = " + fmt(5 * dt));
  RingSpec ring10 = ring;
  ring10.threshold = 10.0 * a.threshold;
  const SolveReport a10 = solve_ring(ring10);
  const double ta10 = a10.blow_up_time.value_or(std::nan(""));
  t.add({std::string("separable"), a10.threshold, T, static_cast<long long>(a10.blow_up_flag), ta10, outer_sup(a10.field)});
  check(r, "flag_persists_x10", a10.blow_up_flag && std::abs(ta10 - t0) <= 5.0 * dt,
        "|t - t0| = " + fmt(std::abs(ta10 - t0)));

  RingSpec bounded = ring;
  bounded.inner = [](const Point &, double) { return 1.0; };
  double sups[2] = {0.0, 0.0};
  bool flagged = false;
  for (int s = 0; s < 2; ++s)
  {
    RingSpec b = bounded;
    b.t_end = T * (s + 1);
    b.output_steps = 100 * (s + 1);
    const SolveReport rb = solve_ring(b);
    flagged = flagged || rb.blow_up_flag;
    sups[s] = outer_sup(rb.field);
    t.add({std::string("bounded"), rb.threshold, b.t_end, static_cast<long long>(rb.blow_up_flag),
           rb.blow_up_time.value_or(std::nan("")), sups[s]});
  }
  check(r, "bounded_no_flag", !flagged, flagged ? "flag raised" : "no flag");
  const double change = rel(sups[1], sups[0]);
  check(r, "bounded_sup_stable", change <= 0.01, "sup change under T doubling " + fmt(change));
  r.tables = {t};
  r.summary = {{"blow_up_time", ta}, {"blow_up_time_x10", ta10}, {"t0", t0}, {"dt", dt},
               {"bounded_sup_T", sups[0]}, {"bounded_sup_2T", sups[1]}};
  return r;
}

// Criterion 6.
ExperimentResult comparison_experiment(const ExperimentConfig &c)
{
  ExperimentResult r;
  const int pairs = c.pairs.value_or(1000);
  const int cells = c.grid.value_or(64);
  const double T = c.t_end.value_or(0.1);
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Table t{"pairs", {"pair", "equation", "exponent", "max_violation", "min_positive", "steps"}, {}};
  double worst = -1e300;
  bool positive = true;
  for (int k = 0; k < pairs; ++k)
  {
    const Equation eq = c.equation ? *c.equation : (k % 2 == 0 ? Equation::PLaplace : Equation::PME);
    EvolutionProblem a;
    a.equation = eq;
    if (eq == Equation::PLaplace)
    {
      a.params = MediumParams::plaplace(c.p.value_or(2.5 + 1.5 * unit(rng)));
    }
    else
    {
      a.params = MediumParams::pme(c.m.value_or(1.5 + 1.5 * unit(rng)));
    }
    a.grid = Grid::interval_span(-1.0, 1.0, cells, 0.0, T, 10);
    a.cfl = c.cfl.value_or(0.9);
    auto bumps = [&](double scale) {
      Eigen::VectorXd u = Eigen::VectorXd::Zero(cells + 1);
      const int count = 1 + static_cast<int>(3 * unit(rng));
      for (int j = 0; j < count; ++j)
      {
        const double amp = scale * unit(rng), ctr = -1.0 + 2.0 * unit(rng), w = 0.05 + 0.3 * unit(rng);
        for (int i = 0; i <= cells; ++i)
        {
          const double x = a.grid.coord(0, i);
          u[i] += amp * std::max(0.0, 1.0 - (x - ctr) * (x - ctr) / (w * w));
        }
      }
      return u;
    };
    a.initial = bumps(1.0);
    const double la = 0.2 * unit(rng), ra = 0.2 * unit(rng);
    a.initial[0] = la;
    a.initial[cells] = ra;
    EvolutionProblem b = a;
    b.initial = a.initial + bumps(0.5);
    const double lb = la + 0.1 * unit(rng), rb = ra + 0.1 * unit(rng);
    b.initial[0] = lb;
    b.initial[cells] = rb;
    a.left = BoundaryData::dirichlet(la);
    a.right = BoundaryData::dirichlet(ra);
    b.left = BoundaryData::dirichlet(lb);
    b.right = BoundaryData::dirichlet(rb);
    const ComparisonReport rep = comparison_check(a, b);
    worst = std::max(worst, rep.max_violation);
    positive = positive && rep.min_positive;
    t.add({static_cast<long long>(k), std::string(to_string(eq)),
           eq == Equation::PLaplace ? a.params.p : *a.params.m, rep.max_violation,
           static_cast<long long>(rep.min_positive), static_cast<long long>(rep.times.size())});
  }
  check(r, "ordered", worst <= 1e-12, "max violation " + fmt(worst) + " <= 1e-12 over " + std::to_string(pairs) + " pairs");
  check(r, "positivity", positive, positive ? "all runs non-negative" : "negative values seen");
  r.tables = {t};
  r.summary = {{"pairs", static_cast<long long>(pairs)}, {"max_violation", worst},
               {"positive", static_cast<long long>(positive)}};
  return r;
}

ScalarField evolved_pme_bump(const MediumParams &mp, int cells, double T, int steps, double cfl)
{
  EvolutionProblem pr;
  pr.params = mp;
  pr.equation = Equation::PME;
  pr.grid = Grid::interval_span(-1.0, 1.0, cells, 0.0, T, steps);
  pr.cfl = cfl;
  pr.initial.resize(cells + 1);
  for (int i = 0; i <= cells; ++i)
  {
    const double x = pr.grid.coord(0, i);
    pr.initial[i] = 0.2 + std::exp(-10.0 * x * x);
  }
  pr.left = BoundaryData::dirichlet(pr.initial[0]);
  pr.right = BoundaryData::dirichlet(pr.initial[cells]);
  return evolve(pr).field;
}

// Criterion 7.
ExperimentResult harnack_experiment(const ExperimentConfig &c)
{
  ExperimentResult r;
  const int S = c.samples.value_or(200);
  BarenblattSpec b;
  b.params = plaplace_params(c);
  require_1d(b.params, "harnack");
  b.C = c.C.value_or(1.0);
  const SpaceTimeFunction v = barenblatt_function(b);
  const double X = 0.7 * barenblatt_support_radius(b, 0.5);
  const Grid d = Grid::interval_span(-X, X, c.grid.value_or(512), 0.5, 2.0, 100);
  Table t{"gamma", {"field", "samples", "gamma", "skipped"}, {}};
  auto gamma = [&](const SpaceTimeFunction &u, const Grid &g, const MediumParams &mp, Equation eq,
                   int samples, const std::string &name) {
    HarnackOptions o;
    o.samples = samples;
    o.seed = c.seed;
    const HarnackReport rep = harnack_check(u, g, mp, eq, o);
    t.add({name, static_cast<long long>(samples), rep.gamma_measured, static_cast<long long>(rep.skipped)});
    return rep.gamma_measured;
  };
  const double g1 = gamma(v, d, b.params, Equation::PLaplace, S, "barenblatt");
  const double g2 = gamma(v, d, b.params, Equation::PLaplace, 2 * S, "barenblatt");
  check(r, "barenblatt_stable", std::isfinite(g1) && rel(g2, g1) <= 0.1,
        "gamma " + fmt(g1) + " -> " + fmt(g2));

  const double kappa = 2.0;
  const double pm2 = b.params.p - 2.0;
  const SpaceTimeFunction vk = [b, kappa, pm2](const Point &x, double s) {
    return kappa * barenblatt_eval(b, x, std::pow(kappa, pm2) * s);
  };
  const double scale = std::pow(kappa, -pm2);
  const Grid dk = Grid::interval_span(-X, X, d.counts[0] - 1, 0.5 * scale, 2.0 * scale, 100);
  const double gk = gamma(vk, dk, b.params, Equation::PLaplace, S, "barenblatt_rescaled");
  check(r, "intrinsic_scaling", rel(gk, g1) <= 0.01, "gamma " + fmt(g1) + " vs rescaled " + fmt(gk));

  const MediumParams pm = pme_params(c);
  require_1d(pm, "harnack");
  const ScalarField bump = evolved_pme_bump(pm, 256, 1.0, 400, c.cfl.value_or(0.9));
  const SpaceTimeFunction bf = as_function(bump);
  const double p1 = gamma(bf, bump.grid(), pm, Equation::PME, S, "pme_bump");
  const double p2 = gamma(bf, bump.grid(), pm, Equation::PME, 2 * S, "pme_bump");
  check(r, "pme_stable", std::isfinite(p1) && rel(p2, p1) <= 0.1, "gamma " + fmt(p1) + " -> " + fmt(p2));
  r.tables = {t};
  r.summary = {{"gamma_barenblatt", g1}, {"gamma_barenblatt_doubled", g2}, {"gamma_rescaled", gk},
               {"gamma_pme", p1}, {"gamma_pme_doubled", p2}};
  return r;
}

// Criterion 8.
ExperimentResult infconv_experiment(const ExperimentConfig &c)
{
  ExperimentResult r;
  BarenblattSpec b;
  b.params = plaplace_params(c);
  require_1d(b.params, "infconv");
  const int cells = c.grid.value_or(64);
  const ScalarField v = sample(barenblatt_function(b), Grid::interval_span(-2.0, 2.0, cells, 0.5, 1.0, cells / 2));
  InfConvSpec spec;
  spec.domain = grid_extent(v.grid());
  Table t{"infconv", {"epsilon", "sup_error", "below_field", "byte_identical"}, {}};
  std::vector<ScalarField> results;
  double prev_err = 1e300;
  bool below = true, identical = true, decreasing = true;
  for (double eps : {0.1, 0.05, 0.025})
  {
    spec.epsilon = eps;
    ScalarField brute = inf_convolve(v, spec, InfConvMethod::BruteForce);
    const ScalarField fast = inf_convolve(v, spec, InfConvMethod::LowerEnvelope);
    const bool same = brute.values().size() == fast.values().size() &&
                      std::memcmp(brute.values().data(), fast.values().data(),
                                  sizeof(double) * brute.values().size()) == 0;
    const bool under = (brute.values() <= v.values()).all();
    const double err = (v.values() - brute.values()).abs().maxCoeff();
    t.add({eps, err, static_cast<long long>(under), static_cast<long long>(same)});
    below = below && under;
    identical = identical && same;
    decreasing = decreasing && err < prev_err;
    prev_err = err;
    results.push_back(std::move(brute));
  }
  bool monotone = true;
  for (std::size_t k = 0; k + 1 < results.size(); ++k)
  {
    monotone = monotone && (results[k].values() <= results[k + 1].values()).all();
  }
  check(r, "below_field", below, "v_eps <= v");
  check(r, "monotone_in_eps", monotone, "v_0.1 <= v_0.05 <= v_0.025");
  check(r, "uniform_error_decreasing", decreasing, "sup |v - v_eps| decreasing");
  check(r, "byte_identical", identical, "lower envelope matches brute force bit for bit");
  r.tables = {t};
  r.summary = {{"final_sup_error", prev_err}};
  return r;
}

// Criterion 9.
ExperimentResult caccioppoli_experiment(const ExperimentConfig &c)
{
  ExperimentResult r;
  BarenblattSpec b;
  b.params = plaplace_params(c);
  require_1d(b.params, "caccioppoli");
  b.C = c.C.value_or(1.0);
  const int N = c.grid.value_or(512);
  const double X = std::max(4.0, 1.1 * barenblatt_support_radius(b, 1.0));
  const Cutoff zeta{Point::Zero(), 1.5};
  Table t{"caccioppoli", {"cells", "energy", "sup_slice", "lhs", "cutoff_term", "initial_slice", "rhs", "ratio"}, {}};
  double lo = 1e300, hi = 0.0;
  for (int cells : {N / 4, N / 2, N})
  {
    const SolveReport rep = evolve_barenblatt(b, X, cells, 0.5, 1.0, 50, c.cfl.value_or(0.9));
    const CaccioppoliReport cr = caccioppoli_check(rep.field, zeta, 0.5, 1.0, b.params.p);
    t.add({static_cast<long long>(cells), cr.energy, cr.sup_slice, cr.lhs, cr.cutoff_term,
           cr.initial_slice, cr.rhs, cr.ratio});
    lo = std::min(lo, cr.ratio);
    hi = std::max(hi, cr.ratio);
  }
  check(r, "ratio_bounded", lo > 0.0 && std::isfinite(hi) && hi / lo <= 2.0,
        "ratios in [" + fmt(lo) + ", " + fmt(hi) + "], spread " + fmt(hi / lo) + " <= 2");
  r.tables = {t};
  r.summary = {{"ratio_min", lo}, {"ratio_max", hi}};
  return r;
}

// Criterion 10.
ExperimentResult pme_mirror_experiment(const ExperimentConfig &c)
{
  ExperimentResult r;
  const MediumParams mp = pme_params(c);
  require_1d(mp, "pme_mirror");
  const double m = *mp.m;
  const DerivedConstants dc = derived_constants(mp, Equation::PME);

  // Sharp exponents on the self-similar source solution.
  const PMEProfile prof = evolve_pme_profile(mp);
  const SpaceTimeFunction v = pme_profile_function(prof);
  const SpaceTimeFunction grad = [prof](const Point &x, double t) {
    return pme_profile_power_gradient(prof, x, t);
  };
  const SingularHint hint = SingularHint::point(Point::Zero(), 0.0, 1.0, 1.0, dc.lambda);
  Table shells = shell_table("shells");
  auto run = [&](const SpaceTimeFunction &fn, const std::string &field, double q, Verdict want,
                 const std::string &name) {
    const SummabilityReport rep = classify_summability(fn, 1, hint, q);
    add_shells(shells, field, rep);
    check(r, name, rep.verdict == want, verdict_detail(rep));
  };
  run(v, "source", dc.q_crit - 0.5, Verdict::Finite, "source_below_qcrit");
  run(v, "source", dc.q_crit, Verdict::Divergent, "source_at_qcrit");
  run(v, "source", dc.class_threshold, Verdict::Finite, "source_at_class_threshold");
  run(grad, "source_grad_vm", dc.qgrad_crit - 0.2, Verdict::Finite, "gradient_below_qgrad");
  run(grad, "source_grad_vm", dc.qgrad_crit, Verdict::Divergent, "gradient_at_qgrad");

  // Class M signature on the Friendly Giant separable solution.
  const double L = c.L.value_or(2.0);
  const int N = c.grid.value_or(512);
  const PMESeparableSpec sep = make_pme_separable(Grid::interval_span(-0.5 * L, 0.5 * L, N), mp, 0.3);
  const ClassMSetup s = class_m_setup(sep.giant, L, N, 0.3, 1.0, 200);
  class_m_checks(r, pme_separable_function(sep), s, mp, Equation::PME, "separable_", shells);

  // Giant: oracle agreement and residual of the oracle profile under refinement.
  Table giant{"giant", {"cells", "solver_Gmax", "oracle_Gmax", "relative_error", "oracle_residual"}, {}};
  const GiantFirstIntegral1D o = giant_first_integral_oracle(m, 1.0);
  double prev_res = 1e300, err_fine = 0.0;
  bool res_decreasing = true;
  for (int cells : {128, 256, 512, 1024})
  {
    const Grid dom = Grid::interval_span(0.0, 1.0, cells);
    const Eigen::VectorXd G = giant_profile_from_first_integral(m, 1.0, cells);
    const double res = euler_lagrange_residual(dom, G, mp, Equation::PME);
    const EigenResult e = minimize_quotient(dom, mp, Equation::PME);
    err_fine = rel(e.max(), o.Gmax);
    giant.add({static_cast<long long>(cells), e.max(), o.Gmax, err_fine, res});
    res_decreasing = res_decreasing && res < prev_res;
    prev_res = res;
  }
  check(r, "giant_residual_decreasing", res_decreasing, "finest residual " + fmt(prev_res));
  check(r, "giant_oracle", err_fine <= 0.005, "rel " + fmt(err_fine) + " <= 0.005 at 1024 cells");

  // Truncated-power gradient energy: growth on the separable field, saturation on a bump.
  Table trunc{"truncation", {"field", "j", "energy"}, {}};
  const Grid dense = Grid::interval_span(-0.5 * L, 0.5 * L, 256, 0.3, 0.55, 4000);
  const ScalarField sf = sample(pme_separable_function(sep), dense);
  const Cylinder win = grid_extent(dense);
  double prev = 0.0;
  bool grows = true;
  for (double j : {1.0, 10.0, 100.0, 1e3, 1e4})
  {
    const double e = pme_truncation_gradient_check(sf, m, j, win);
    trunc.add({std::string("separable"), j, e});
    grows = grows && (prev == 0.0 || e >= 2.0 * prev);
    prev = e;
  }
  check(r, "truncation_grows", grows, "energy at least doubles per decade of j, last " + fmt(prev));
  const ScalarField bump = evolved_pme_bump(mp, 256, 1.0, 400, c.cfl.value_or(0.9));
  const double bump_top = std::pow(bump.max(), m);
  std::vector<double> sat;
  for (double j : {0.5, 10.0, 100.0, 1000.0})
  {
    const double e = pme_truncation_gradient_check(bump, m, j, grid_extent(bump.grid()));
    trunc.add({std::string("bump"), j, e});
    if (j > bump_top)
    {
      sat.push_back(e);
    }
  }
  bool saturates = sat.size() >= 2;
  for (double e : sat)
  {
    saturates = saturates && rel(e, sat.front()) <= 1e-12;
  }
  check(r, "truncation_saturates", saturates, "constant for j > sup v^m = " + fmt(bump_top));

  r.tables = {shells, giant, trunc};
  r.summary.insert(r.summary.begin(), {{"q_crit", dc.q_crit}, {"qgrad_crit", dc.qgrad_crit},
                                       {"class_threshold", dc.class_threshold},
                                       {"giant_solver_max", giant.rows.back()[1]},
                                       {"giant_oracle_max", o.Gmax}});
  return r;
}

}  // namespace

const std::vector<ExperimentInfo> &experiments()
{
  static const std::vector<ExperimentInfo> list = {
      {"barenblatt", 1, "Barenblatt evolution, mass and residual order"},
      {"sharp_exponents", 2, "Sharp summability exponents on Barenblatt"},
      {"class_m", 3, "Class M signature of the separable solution"},
      {"eigen_oracle", 4, "Variational eigenfunction vs first-integral oracle"},
      {"ring_probe", 5, "Ring boundary-value blow-up probe"},
      {"comparison", 6, "Comparison principle on random ordered data"},
      {"harnack", 7, "Intrinsic Harnack constant estimates"},
      {"infconv", 8, "Infimal convolution properties"},
      {"caccioppoli", 9, "Caccioppoli ratio under refinement"},
      {"pme_mirror", 10, "Porous medium mirror of the dichotomy checks"},
  };
  return list;
}

const ExperimentInfo &experiment_info(const std::string &name)
{
  for (const ExperimentInfo &e : experiments())
  {
    if (e.name == name)
    {
      return e;
    }
  }
  throw ConfigError("unknown experiment '" + name + "'");
}

ExperimentResult run_experiment(const ExperimentConfig &config)
{
  const ExperimentInfo &info = experiment_info(config.experiment);
  ExperimentResult r;
  switch (info.criterion)
  {
  case 1:
    r = barenblatt_experiment(config);
    break;
  case 2:
    r = sharp_exponents_experiment(config);
    break;
  case 3:
    r = class_m_experiment(config);
    break;
  case 4:
    r = eigen_oracle_experiment(config);
    break;
  case 5:
    r = ring_probe_experiment(config);
    break;
  case 6:
    r = comparison_experiment(config);
    break;
  case 7:
    r = harnack_experiment(config);
    break;
  case 8:
    r = infconv_experiment(config);
    break;
  case 9:
    r = caccioppoli_experiment(config);
    break;
  default:
    r = pme_mirror_experiment(config);
    break;
  }
  r.experiment = info.name;
  r.criterion = info.criterion;
  return r;
}

void write_artifacts(const ExperimentResult &result, const std::string &dir, OutputFormat f)
{
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
  {
    throw ConfigError("cannot create output directory " + dir + ": " + ec.message());
  }
  auto open = [&](const std::string &stem) {
    const std::string path = (std::filesystem::path(dir) / (stem + file_extension(f))).string();
    std::ofstream os(path, std::ios::binary);
    if (!os)
    {
      throw ConfigError("cannot write " + path);
    }
    return os;
  };
  for (const Table &t : result.tables)
  {
    std::ofstream os = open(t.name);
    write_table(t, f, os);
  }
  KeyValues kv = {{"experiment", result.experiment},
                  {"criterion", static_cast<long long>(result.criterion)},
                  {"passed", std::string(result.passed() ? "true" : "false")}};
  for (const Check &c : result.checks)
  {
    kv.push_back({"check." + c.name, std::string(c.passed ? "PASS" : "FAIL") + " " + c.detail});
  }
  for (const auto &e : result.summary)
  {
    kv.push_back(e);
  }
  std::ofstream os = open("summary");
  write_key_values(kv, f, os);
}

}  // namespace slowdiff
