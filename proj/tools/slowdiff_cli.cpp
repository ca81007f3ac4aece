// Copyright 2026 The slowdiff Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end. Exit codes: 0 success, 1 failed experiment checks,
// 2 configuration error, 3 numeric failure, 4 inconclusive verdict.

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "slowdiff/diagnostics.hpp"
#include "slowdiff/eigenfunctions.hpp"
#include "slowdiff/evolution.hpp"
#include "slowdiff/exact_solutions.hpp"
#include "slowdiff/experiments.hpp"
#include "slowdiff/io.hpp"
#include "slowdiff/pme.hpp"
#include "slowdiff/regularization.hpp"

using namespace slowdiff;

namespace
{

constexpr int kFailedChecks = 1;
constexpr int kConfigExit = 2;
constexpr int kNumericExit = 3;
constexpr int kInconclusiveExit = 4;

struct Options
{
  std::optional<double> p, m, C, L, t_end, cfl, t, t0, eps, threshold, harnack_C, radius;
  std::optional<int> n, grid, samples;
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "csv";
  std::string input;
  std::string what;
  std::string config;
  bool oracle = false;
};

struct Output
{
  std::vector<Table> tables;
  KeyValues summary;
  int exit = 0;
};

void add_common(CLI::App *app, Options &o)
{
  app->add_option("--p", o.p, "p-Laplace exponent (p > 2)");
  app->add_option("--m", o.m, "porous medium exponent (m > 1)");
  app->add_option("--n", o.n, "spatial dimension");
  app->add_option("--C", o.C, "Barenblatt constant");
  app->add_option("--L", o.L, "domain length");
  app->add_option("--grid", o.grid, "cells");
  app->add_option("--t-end", o.t_end, "final time");
  app->add_option("--cfl", o.cfl, "CFL safety factor in (0, 1]");
  app->add_option("--seed", o.seed, "random seed");
  app->add_option("--out", o.out, "output directory (stdout when omitted)");
  app->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

MediumParams plaplace(const Options &o)
{
  MediumParams mp = MediumParams::plaplace(o.p.value_or(3.0), o.n.value_or(1));
  mp.validate(Equation::PLaplace);
  return mp;
}

MediumParams pme(const Options &o)
{
  MediumParams mp = MediumParams::pme(o.m.value_or(2.0), o.n.value_or(1));
  mp.validate(Equation::PME);
  return mp;
}

void require_1d(const MediumParams &mp)
{
  if (mp.n != 1)
  {
    throw ConfigError("this command runs in one spatial dimension (--n 1)");
  }
}

Table profile_table(const std::string &name, const Grid &g, const Eigen::VectorXd &u)
{
  Table t{name, {"x", "value"}, {}};
  for (int i = 0; i < g.space_size(); ++i)
  {
    t.add({g.node(i)[0], u[i]});
  }
  return t;
}

EigenResult separable_eigen(const Options &o, const MediumParams &mp, Equation eq)
{
  const double L = o.L.value_or(2.0);
  return minimize_quotient(Grid::interval_span(-0.5 * L, 0.5 * L, o.grid.value_or(512)), mp, eq);
}

Output cmd_evaluate(const Options &o)
{
  Output out;
  const double t = o.t.value_or(1.0);
  const int cells = o.grid.value_or(512);
  Eigen::VectorXd u(cells + 1);
  Grid g;
  if (o.what == "barenblatt")
  {
    BarenblattSpec b;
    b.params = plaplace(o);
    require_1d(b.params);
    b.C = o.C.value_or(1.0);
    b.validate();
    const double R = t > 0.0 ? barenblatt_support_radius(b, t) : 1.0;
    const double L = o.L.value_or(2.5 * R);
    g = Grid::interval_span(-0.5 * L, 0.5 * L, cells);
    for (int i = 0; i <= cells; ++i)
    {
      u[i] = barenblatt_eval(b, g.node(i), t);
    }
    out.summary = {{"solution", o.what}, {"t", t}, {"support_radius", R}};
    if (t > 0.0)
    {
      out.summary.push_back({"mass", barenblatt_mass(b, t)});
    }
  }
  else if (o.what == "separable" || o.what == "pme-separable")
  {
    const bool is_pme = o.what == "pme-separable";
    const MediumParams mp = is_pme ? pme(o) : plaplace(o);
    require_1d(mp);
    const EigenResult e = separable_eigen(o, mp, is_pme ? Equation::PME : Equation::PLaplace);
    g = e.grid;
    const double t0 = o.t0.value_or(0.0);
    for (int i = 0; i <= cells; ++i)
    {
      u[i] = is_pme ? pme_separable_eval({e, t0}, g.node(i), t) : separable_eval({e, t0}, g.node(i), t);
    }
    out.summary = {{"solution", o.what}, {"t", t}, {"t0", t0}, {"profile_max", e.max()}};
  }
  else if (o.what == "pme-source")
  {
    const MediumParams mp = pme(o);
    require_1d(mp);
    const PMEProfile prof = evolve_pme_profile(mp);
    const double L = o.L.value_or(2.5 * prof.support_radius() * (t > 0.0 ? std::pow(t, prof.beta) : 1.0));
    g = Grid::interval_span(-0.5 * L, 0.5 * L, cells);
    for (int i = 0; i <= cells; ++i)
    {
      u[i] = pme_profile_eval(prof, g.node(i), t);
    }
    out.summary = {{"solution", o.what}, {"t", t}, {"alpha", prof.alpha}, {"beta", prof.beta}};
  }
  else
  {
    throw ConfigError("evaluate: unknown solution '" + o.what + "' (barenblatt, separable, pme-separable, pme-source)");
  }
  out.tables.push_back(profile_table("values", g, u));
  return out;
}

Output cmd_eigen(const Options &o)
{
  Output out;
  const bool is_pme = o.m.has_value();
  const MediumParams mp = is_pme ? pme(o) : plaplace(o);
  const double L = o.L.value_or(1.0);
  const int cells = o.grid.value_or(1024);
  Grid dom;
  if (mp.n == 1)
  {
    dom = Grid::interval_span(0.0, L, cells);
  }
  else if (mp.n == 2)
  {
    dom = Grid::box2d(Point::Zero(), L / cells, cells + 1, cells + 1);
  }
  else
  {
    throw ConfigError("eigen runs on intervals (n = 1) or squares (n = 2)");
  }
  const EigenResult e = minimize_quotient(dom, mp, is_pme ? Equation::PME : Equation::PLaplace);
  out.summary = {{"equation", std::string(is_pme ? "pme" : "plaplace")},
                 {"L", L},
                 {"J0", e.J0},
                 {"normC", e.normC},
                 {"max", e.max()},
                 {"residual", e.residual},
                 {"iterations", static_cast<long long>(e.iterations)}};
  if (mp.n == 1)
  {
    out.tables.push_back(profile_table("profile", e.grid, e.U));
  }
  if (o.oracle)
  {
    if (mp.n != 1)
    {
      throw ConfigError("the first-integral oracle is one-dimensional");
    }
    Table t{"oracle", {"exponent", "L", "solver_M", "oracle_M", "relative_error"}, {}};
    const double M = is_pme ? giant_first_integral_oracle(*mp.m, L).Gmax : first_integral_oracle(mp.p, L).M;
    const double err = std::abs(e.max() - M) / M;
    t.add({is_pme ? *mp.m : mp.p, L, e.max(), M, err});
    out.tables.insert(out.tables.begin(), t);
    out.summary.push_back({"oracle_M", M});
    out.summary.push_back({"relative_error", err});
  }
  return out;
}

Output cmd_evolve(const Options &o)
{
  Output out;
  const int cells = o.grid.value_or(512);
  EvolutionProblem pr;
  pr.cfl = o.cfl.value_or(0.9);
  Eigen::VectorXd exact;
  if (o.what == "barenblatt")
  {
    BarenblattSpec b;
    b.params = plaplace(o);
    require_1d(b.params);
    b.C = o.C.value_or(1.0);
    b.validate();
    const double T = o.t_end.value_or(1.0);
    if (!(T > 0.5))
    {
      throw ConfigError("barenblatt evolution starts at t = 0.5; --t-end must exceed it");
    }
    const double X = o.L ? 0.5 * *o.L : std::max(4.0, 1.1 * barenblatt_support_radius(b, T));
    pr.params = b.params;
    pr.grid = Grid::interval_span(-X, X, cells, 0.5, T, 1);
    pr.initial.resize(cells + 1);
    exact.resize(cells + 1);
    for (int i = 0; i <= cells; ++i)
    {
      pr.initial[i] = barenblatt_eval(b, pr.grid.node(i), 0.5);
      exact[i] = barenblatt_eval(b, pr.grid.node(i), T);
    }
  }
  else if (o.what == "bump")
  {
    const bool is_pme = o.m.has_value();
    pr.params = is_pme ? pme(o) : plaplace(o);
    require_1d(pr.params);
    pr.equation = is_pme ? Equation::PME : Equation::PLaplace;
    const double L = o.L.value_or(2.0);
    pr.grid = Grid::interval_span(-0.5 * L, 0.5 * L, cells, 0.0, o.t_end.value_or(1.0), 1);
    pr.initial.resize(cells + 1);
    for (int i = 0; i <= cells; ++i)
    {
      const double x = pr.grid.coord(0, i) / (0.25 * L);
      pr.initial[i] = std::max(0.0, 1.0 - x * x);
    }
  }
  else
  {
    throw ConfigError("evolve: unknown initial data '" + o.what + "' (barenblatt, bump)");
  }
  const SolveReport rep = evolve(pr);
  const ScalarField &f = rep.field;
  const int K = f.grid().steps;
  Table t{"final", exact.size() ? std::vector<std::string>{"x", "value", "exact"} : std::vector<std::string>{"x", "value"}, {}};
  double err = 0.0;
  for (int i = 0; i < f.grid().space_size(); ++i)
  {
    if (exact.size())
    {
      t.add({f.grid().node(i)[0], f(K, i), exact[i]});
      err = std::max(err, std::abs(f(K, i) - exact[i]));
    }
    else
    {
      t.add({f.grid().node(i)[0], f(K, i)});
    }
  }
  out.tables.push_back(t);
  const double h = f.grid().h;
  out.summary = {{"initial", o.what},
                 {"t_end", f.grid().t_end()},
                 {"internal_steps", static_cast<long long>(rep.internal_steps())},
                 {"mass_start", f.values().row(0).sum() * h},
                 {"mass_end", f.values().row(K).sum() * h},
                 {"max_end", f.values().row(K).maxCoeff()}};
  if (exact.size())
  {
    out.summary.push_back({"relative_sup_error", err / exact.maxCoeff()});
  }
  return out;
}

Output cmd_probe(const Options &o)
{
  Output out;
  const MediumParams mp = plaplace(o);
  require_1d(mp);
  const double L = o.L.value_or(2.0);
  RingSpec ring;
  ring.l = 0.25 * L;
  ring.params = mp;
  ring.cells = o.grid.value_or(256);
  ring.t_end = o.t_end.value_or(1.0);
  ring.cfl = o.cfl.value_or(0.9);
  ring.threshold = o.threshold;
  const double t0 = o.t0.value_or(0.5 * ring.t_end);
  if (o.what == "separable")
  {
    Options eo = o;
    eo.grid = 512;
    ring.inner = separable_function({separable_eigen(eo, mp, Equation::PLaplace), t0});
  }
  else if (o.what == "bounded")
  {
    ring.inner = [](const Point &, double) { return 1.0; };
  }
  else
  {
    throw ConfigError("probe: unknown trace '" + o.what + "' (separable, bounded)");
  }
  const SolveReport rep = solve_ring(ring);
  Table t{"trace", {"t", "max", "dt"}, {}};
  for (std::size_t k = 0; k < rep.step_times.size(); ++k)
  {
    t.add({rep.step_times[k], rep.max_trace[k], rep.dt_trace[k]});
  }
  out.tables.push_back(t);
  out.summary = {{"trace", o.what},
                 {"blow_up", std::string(rep.blow_up_flag ? "true" : "false")},
                 {"blow_up_time", rep.blow_up_time.value_or(std::nan(""))},
                 {"threshold", rep.threshold},
                 {"forced_steps", static_cast<long long>(rep.forced_steps)}};
  return out;
}

ScalarField pme_bump(const MediumParams &mp, int cells, double T, double cfl)
{
  EvolutionProblem pr;
  pr.params = mp;
  pr.equation = Equation::PME;
  pr.grid = Grid::interval_span(-1.0, 1.0, cells, 0.0, T, 400);
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

Output classify_output(const ClassVerdict &cv)
{
  Output out;
  Table t{"shells", {"q", "shell_index", "scale", "integral", "verdict"}, {}};
  for (const SummabilityReport &r : cv.evidence)
  {
    for (const ShellIntegral &s : r.shells)
    {
      t.add({r.q, static_cast<long long>(s.index), s.scale, s.value, std::string(to_string(r.verdict))});
    }
  }
  out.tables.push_back(t);
  out.summary = {{"label", std::string(to_string(cv.label))},
                 {"threshold_q", cv.threshold_q},
                 {"verdict", std::string(to_string(cv.evidence.front().verdict))},
                 {"tail_ratio", cv.evidence.front().tail_ratio},
                 {"t0_detected", cv.t0_detected.value_or(std::nan(""))},
                 {"minorant_floor", cv.minorant_floor}};
  out.exit = cv.label == ClassLabel::Unknown ? kInconclusiveExit : 0;
  return out;
}

Output cmd_classify(const Options &o)
{
  const std::string input = o.input.empty() ? "separable" : o.input;
  const double T = o.t_end.value_or(1.0);
  const int cells = o.grid.value_or(512);
  const double L = o.L.value_or(2.0);
  const Grid sampling = Grid::interval_span(-0.5 * L, 0.5 * L, cells, 0.0, T, 200);
  if (input == "separable" || input == "pme-separable")
  {
    const bool is_pme = input == "pme-separable";
    const MediumParams mp = is_pme ? pme(o) : plaplace(o);
    require_1d(mp);
    const Equation eq = is_pme ? Equation::PME : Equation::PLaplace;
    const EigenResult e = separable_eigen(o, mp, eq);
    const double t0 = o.t0.value_or(0.3 * T);
    const SpaceTimeFunction v = is_pme ? pme_separable_function({e, t0}) : separable_function({e, t0});
    return classify_output(classify_field(v, sampling, mp, eq));
  }
  if (input == "barenblatt")
  {
    BarenblattSpec b;
    b.params = plaplace(o);
    require_1d(b.params);
    b.C = o.C.value_or(1.0);
    const Grid g = Grid::interval_span(-0.5 * L, 0.5 * L, cells, 0.5, 0.5 + T, 200);
    return classify_output(classify_field(barenblatt_function(b), g, b.params));
  }
  if (input == "zero")
  {
    const MediumParams mp = plaplace(o);
    return classify_output(classify_field([](const Point &, double) { return 0.0; }, sampling, mp));
  }
  if (input == "pme-bump")
  {
    const MediumParams mp = pme(o);
    require_1d(mp);
    const ScalarField f = pme_bump(mp, cells, T, o.cfl.value_or(0.9));
    return classify_output(pme_classify(as_function(f), f.grid(), mp));
  }
  throw ConfigError("classify: unknown input '" + input + "' (separable, pme-separable, barenblatt, zero, pme-bump)");
}

Output cmd_harnack(const Options &o)
{
  Output out;
  const std::string input = o.input.empty() ? "barenblatt" : o.input;
  HarnackOptions ho;
  ho.C_used = o.harnack_C.value_or(1.0);
  ho.samples = o.samples.value_or(200);
  ho.seed = o.seed;
  HarnackReport rep;
  if (input == "barenblatt")
  {
    BarenblattSpec b;
    b.params = plaplace(o);
    require_1d(b.params);
    b.C = o.C.value_or(1.0);
    const double X = 0.7 * barenblatt_support_radius(b, 0.5);
    const Grid d = Grid::interval_span(-X, X, o.grid.value_or(512), 0.5, 2.0, 100);
    rep = harnack_check(barenblatt_function(b), d, b.params, Equation::PLaplace, ho);
  }
  else if (input == "pme-bump")
  {
    const MediumParams mp = pme(o);
    require_1d(mp);
    const ScalarField f = pme_bump(mp, o.grid.value_or(256), o.t_end.value_or(1.0), o.cfl.value_or(0.9));
    rep = harnack_check(as_function(f), f.grid(), mp, Equation::PME, ho);
  }
  else
  {
    throw ConfigError("harnack: unknown input '" + input + "' (barenblatt, pme-bump)");
  }
  Table t{"samples", {"x0", "t0", "R", "theta", "lhs", "rhs"}, {}};
  for (const HarnackSample &s : rep.samples)
  {
    t.add({s.x0[0], s.t0, s.R, s.theta, s.lhs, s.rhs});
  }
  out.tables.push_back(t);
  out.summary = {{"input", input},
                 {"C_used", rep.C_used},
                 {"gamma_measured", rep.gamma_measured},
                 {"samples", static_cast<long long>(rep.samples.size())},
                 {"skipped", static_cast<long long>(rep.skipped)}};
  return out;
}

Output cmd_caccioppoli(const Options &o)
{
  Output out;
  BarenblattSpec b;
  b.params = plaplace(o);
  require_1d(b.params);
  b.C = o.C.value_or(1.0);
  const int cells = o.grid.value_or(512);
  const double T = o.t_end.value_or(1.0);
  const double X = std::max(4.0, 1.1 * barenblatt_support_radius(b, T));
  EvolutionProblem pr;
  pr.params = b.params;
  pr.grid = Grid::interval_span(-X, X, cells, 0.5, T, 50);
  pr.cfl = o.cfl.value_or(0.9);
  pr.initial.resize(cells + 1);
  for (int i = 0; i <= cells; ++i)
  {
    pr.initial[i] = barenblatt_eval(b, pr.grid.node(i), 0.5);
  }
  const SolveReport rep = evolve(pr);
  const CaccioppoliReport c =
      caccioppoli_check(rep.field, Cutoff{Point::Zero(), o.radius.value_or(1.5)}, 0.5, T, b.params.p);
  out.summary = {{"energy", c.energy},           {"sup_slice", c.sup_slice},
                 {"lhs", c.lhs},                 {"cutoff_term", c.cutoff_term},
                 {"initial_slice", c.initial_slice}, {"rhs", c.rhs},
                 {"bracket_difference", c.bracket_difference}, {"ratio", c.ratio}};
  return out;
}

Output cmd_infconv(const Options &o)
{
  Output out;
  BarenblattSpec b;
  b.params = plaplace(o);
  require_1d(b.params);
  const int cells = o.grid.value_or(64);
  const ScalarField v = sample(barenblatt_function(b), Grid::interval_span(-2.0, 2.0, cells, 0.5, 1.0, std::max(1, cells / 2)));
  InfConvSpec spec;
  spec.epsilon = o.eps.value_or(0.05);
  spec.domain = grid_extent(v.grid());
  const ScalarField brute = inf_convolve(v, spec, InfConvMethod::BruteForce);
  const ScalarField fast = inf_convolve(v, spec, InfConvMethod::LowerEnvelope);
  const bool same = std::memcmp(brute.values().data(), fast.values().data(),
                                sizeof(double) * brute.values().size()) == 0;
  Table t{"regularized", {"t", "x", "value", "regularized"}, {}};
  const Grid &g = brute.grid();
  for (int k = 0; k < g.time_size(); ++k)
  {
    for (int i = 0; i < g.space_size(); ++i)
    {
      t.add({g.time(k), g.node(i)[0], v(k, i), brute(k, i)});
    }
  }
  out.tables.push_back(t);
  out.summary = {{"epsilon", spec.epsilon},
                 {"sup_error", (v.values() - brute.values()).abs().maxCoeff()},
                 {"byte_identical", std::string(same ? "true" : "false")}};
  return out;
}

Output cmd_pme(const Options &o)
{
  Options po = o;
  if (!po.m)
  {
    po.m = 2.0;
  }
  if (o.what == "giant")
  {
    return cmd_eigen(po);
  }
  if (o.what == "classify")
  {
    po.input = o.input.empty() ? "pme-separable" : o.input;
    return cmd_classify(po);
  }
  if (o.what == "source")
  {
    po.what = "pme-source";
    return cmd_evaluate(po);
  }
  if (o.what == "truncation")
  {
    Output out;
    const MediumParams mp = pme(po);
    require_1d(mp);
    const EigenResult e = separable_eigen(po, mp, Equation::PME);
    const double L = o.L.value_or(2.0);
    const Grid dense = Grid::interval_span(-0.5 * L, 0.5 * L, 256, 0.3, 0.55, 4000);
    const ScalarField sf = sample(pme_separable_function({e, 0.3}), dense);
    Table t{"truncation", {"j", "energy"}, {}};
    for (double j : {1.0, 10.0, 100.0, 1e3, 1e4})
    {
      t.add({j, pme_truncation_gradient_check(sf, *mp.m, j, grid_extent(dense))});
    }
    out.tables.push_back(t);
    out.summary = {{"field", std::string("pme-separable")}, {"t0", 0.3}};
    return out;
  }
  throw ConfigError("pme: unknown action '" + o.what + "' (giant, classify, source, truncation)");
}

Output cmd_run(const Options &o, const std::vector<std::pair<std::string, std::string>> &overrides)
{
  auto kv = read_config_file(o.config);
  for (const auto &[k, v] : overrides)
  {
    kv[k] = v;
  }
  const ExperimentConfig cfg = ExperimentConfig::from_key_values(kv);
  const ExperimentResult r = run_experiment(cfg);
  write_artifacts(r, cfg.out, cfg.format);
  Output out;
  out.summary = {{"experiment", r.experiment},
                 {"criterion", static_cast<long long>(r.criterion)},
                 {"passed", std::string(r.passed() ? "true" : "false")},
                 {"out", cfg.out}};
  for (const Check &c : r.checks)
  {
    out.summary.push_back({"check." + c.name, std::string(c.passed ? "PASS " : "FAIL ") + c.detail});
  }
  out.exit = r.passed() ? 0 : kFailedChecks;
  return out;
}

void emit(const Output &out, const Options &o)
{
  const OutputFormat f = parse_format(o.format);
  if (!o.out.empty())
  {
    std::filesystem::create_directories(o.out);
    for (const Table &t : out.tables)
    {
      std::ofstream os(std::filesystem::path(o.out) / (t.name + file_extension(f)), std::ios::binary);
      write_table(t, f, os);
    }
    std::ofstream os(std::filesystem::path(o.out) / (std::string("summary") + file_extension(f)), std::ios::binary);
    write_key_values(out.summary, f, os);
  }
  else if (f == OutputFormat::Json)
  {
    write_json_document(out.tables, out.summary, std::cout);
    return;
  }
  else
  {
    for (const Table &t : out.tables)
    {
      write_table(t, f, std::cout);
      std::cout << '\n';
    }
  }
  write_key_values(out.summary, f, std::cout);
}

int error_record(const std::string &kind, const std::string &message, int code, const std::string &out_dir)
{
  nlohmann::ordered_json j;
  j["error"] = kind;
  j["message"] = message;
  j["exit_code"] = code;
  std::cerr << j.dump() << '\n';
  if (!out_dir.empty())
  {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    std::ofstream os(std::filesystem::path(out_dir) / "error.json");
    if (os)
    {
      os << j.dump(2) << '\n';
    }
  }
  return code;
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"slowdiff: slow-diffusion supersolution experiments"};
  app.require_subcommand(1);
  Options o;
  std::vector<std::string> sets;

  auto *evaluate = app.add_subcommand("evaluate", "sample a closed-form or separable solution at one time");
  evaluate->add_option("solution", o.what, "barenblatt, separable, pme-separable, pme-source")->required();
  evaluate->add_option("--t", o.t, "time");
  evaluate->add_option("--t0", o.t0, "separable blow-up time");
  add_common(evaluate, o);

  auto *eigen = app.add_subcommand("eigen", "solve the separable eigenproblem (--m selects the porous medium giant)");
  eigen->add_flag("--oracle", o.oracle, "compare with the first-integral oracle");
  add_common(eigen, o);

  auto *evolve_cmd = app.add_subcommand("evolve", "explicit evolution from Barenblatt or bump data");
  evolve_cmd->add_option("initial", o.what, "barenblatt, bump")->required();
  add_common(evolve_cmd, o);

  auto *probe = app.add_subcommand("probe", "ring boundary-value blow-up probe");
  probe->add_option("trace", o.what, "separable, bounded")->required();
  probe->add_option("--t0", o.t0, "separable blow-up time");
  probe->add_option("--threshold", o.threshold, "blow-up threshold");
  add_common(probe, o);

  auto *classify = app.add_subcommand("classify", "class B / M verdict");
  classify->add_option("--input", o.input, "separable, pme-separable, barenblatt, zero, pme-bump");
  classify->add_option("--t0", o.t0, "separable blow-up time");
  add_common(classify, o);

  auto *harnack = app.add_subcommand("harnack", "empirical intrinsic Harnack constant");
  harnack->add_option("--input", o.input, "barenblatt, pme-bump");
  harnack->add_option("--harnack-C", o.harnack_C, "waiting-time constant");
  harnack->add_option("--samples", o.samples, "admissible samples");
  add_common(harnack, o);

  auto *cacc = app.add_subcommand("caccioppoli", "energy estimate on the evolved Barenblatt window");
  cacc->add_option("--radius", o.radius, "cutoff radius");
  add_common(cacc, o);

  auto *infconv = app.add_subcommand("infconv", "infimal convolution of a sampled Barenblatt field");
  infconv->add_option("--eps", o.eps, "regularization parameter");
  add_common(infconv, o);

  auto *pme_cmd = app.add_subcommand("pme", "porous medium shortcuts");
  pme_cmd->add_option("action", o.what, "giant, classify, source, truncation")->required();
  pme_cmd->add_option("--input", o.input, "classify input");
  pme_cmd->add_option("--t", o.t, "time");
  pme_cmd->add_flag("--oracle", o.oracle, "compare the giant with the first-integral oracle");
  add_common(pme_cmd, o);

  auto *run = app.add_subcommand("run", "run a named experiment from a key = value config file");
  run->add_option("--config", o.config, "config file")->required();
  run->add_option("--set", sets, "key=value override (repeatable)");
  add_common(run, o);

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::CallForHelp &e)
  {
    return app.exit(e);
  }
  catch (const CLI::CallForAllHelp &e)
  {
    return app.exit(e);
  }
  catch (const CLI::ParseError &e)
  {
    return error_record("ConfigError", e.what(), kConfigExit, "");
  }

  try
  {
    parse_format(o.format);
    Output out;
    if (evaluate->parsed())
    {
      out = cmd_evaluate(o);
    }
    else if (eigen->parsed())
    {
      out = cmd_eigen(o);
    }
    else if (evolve_cmd->parsed())
    {
      out = cmd_evolve(o);
    }
    else if (probe->parsed())
    {
      out = cmd_probe(o);
    }
    else if (classify->parsed())
    {
      out = cmd_classify(o);
    }
    else if (harnack->parsed())
    {
      out = cmd_harnack(o);
    }
    else if (cacc->parsed())
    {
      out = cmd_caccioppoli(o);
    }
    else if (infconv->parsed())
    {
      out = cmd_infconv(o);
    }
    else if (pme_cmd->parsed())
    {
      out = cmd_pme(o);
    }
    else
    {
      // Flags given on the command line override the file.
      std::vector<std::pair<std::string, std::string>> overrides;
      auto put = [&](const char *flag, const char *key) {
        if (run->count(flag) > 0)
        {
          overrides.emplace_back(key, run->get_option(flag)->as<std::string>());
        }
      };
      put("--p", "p");
      put("--m", "m");
      put("--n", "n");
      put("--C", "C");
      put("--L", "L");
      put("--grid", "grid");
      put("--t-end", "t_end");
      put("--cfl", "cfl");
      put("--seed", "seed");
      put("--out", "out");
      put("--format", "format");
      for (const std::string &s : sets)
      {
        const auto eq = s.find('=');
        if (eq == std::string::npos)
        {
          throw ConfigError("--set expects key=value, got '" + s + "'");
        }
        overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
      }
      Options ro = o;
      ro.out.clear();
      out = cmd_run(o, overrides);
      emit(out, ro);
      return out.exit;
    }
    emit(out, o);
    return out.exit;
  }
  catch (const ConvergenceError &e)
  {
    return error_record("ConvergenceError", e.what(), kNumericExit, o.out);
  }
  catch (const NumericError &e)
  {
    return error_record("NumericError", e.what(), kNumericExit, o.out);
  }
  catch (const ParameterError &e)
  {
    return error_record("ParameterError", e.what(), kConfigExit, o.out);
  }
  catch (const DomainError &e)
  {
    return error_record("DomainError", e.what(), kConfigExit, o.out);
  }
  catch (const ContractError &e)
  {
    return error_record("ContractError", e.what(), kConfigExit, o.out);
  }
  catch (const ConfigError &e)
  {
    return error_record("ConfigError", e.what(), kConfigExit, o.out);
  }
  catch (const std::filesystem::filesystem_error &e)
  {
    return error_record("ConfigError", e.what(), kConfigExit, "");
  }
  catch (const std::exception &e)
  {
    return error_record("Error", e.what(), kNumericExit, o.out);
  }
}
