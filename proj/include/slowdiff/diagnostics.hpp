// Copyright 2026 The slowdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "slowdiff/core.hpp"

namespace slowdiff
{

enum class Verdict
{
  Finite,
  Divergent,
  Inconclusive
};

const char *to_string(Verdict v);

// Where shells shrink to.
struct SingularHint
{
  enum class Kind
  {
    Point,     // space-time point; Q_k = box(x, r_k) x (t - T_k, t + T_k)
    TimeSlice  // slice t; Q_k = region x (t - tau_k, t + tau_k), clipped to the region's window
  };
  Kind kind = Kind::Point;
  Point x = Point::Zero();
  double t = 0.0;
  double radius = 1.0;    // r_0 (Point)
  double duration = 1.0;  // T_0 (Point) or tau_0 (TimeSlice)
  double lambda = 2.0;    // Point: T_k = T_0 * factor^{-k lambda} alongside r_k = r_0 factor^{-k}
  Cylinder region;        // TimeSlice: spatial box and the admissible time window

  static SingularHint point(const Point &x, double t, double r0, double T0, double lambda);
  static SingularHint time_slice(double t, const Cylinder &region, double tau0);
};

struct SummabilityOptions
{
  int shells = 8;
  double factor = 4.0;
  int samples_per_dim = 32;  // midpoints per axis and shell piece (callables)
  int tail = 4;
  double divergent_ratio = 0.9;
  double finite_ratio = 0.6;
  // Callables with a time-slice hint: integrate in space over these nodes instead of
  // per-piece midpoints.
  std::optional<Grid> spatial_nodes;
};

struct ShellIntegral
{
  int index = 0;
  double scale = 0.0;  // r_k (Point) or tau_k (TimeSlice)
  double value = 0.0;
};

struct SummabilityReport
{
  double q = 0.0;
  std::vector<ShellIntegral> shells;
  std::vector<double> ratios;  // shell k+1 over shell k
  double tail_ratio = 0.0;     // geometric mean of the last `tail` ratios
  Verdict verdict = Verdict::Inconclusive;
  std::string note;
};

// |v|^q over nested shells Q_k \ Q_{k+1}. Divergent if each of the last `tail` ratios is
// at least divergent_ratio, Finite if each is below finite_ratio.
SummabilityReport classify_summability(const SpaceTimeFunction &v, int dims,
                                       const SingularHint &hint, double q,
                                       const SummabilityOptions &options = {});
// Sampled fields use their own nodes and stop once shells get thinner than 2h or 2dt.
SummabilityReport classify_summability(const ScalarField &field, const SingularHint &hint,
                                       double q, const SummabilityOptions &options = {});

enum class ClassLabel
{
  B,
  M,
  Unknown
};

const char *to_string(ClassLabel l);

struct ClassVerdict
{
  ClassLabel label = ClassLabel::Unknown;
  std::optional<double> t0_detected;
  double minorant_floor = 0.0;  // min over the core of inf_t v (t - t0)^{decay}
  double threshold_q = 0.0;
  std::vector<SummabilityReport> evidence;
};

struct ClassifyOptions
{
  SummabilityOptions summability;
  double core_fraction = 0.5;    // central part of each spatial axis
  double window_fraction = 0.1;  // t in (t0, t0 + window_fraction (T - t0)]
  int floor_time_samples = 64;
  double shell_fraction = 0.5;   // tau_0 = shell_fraction * (T - t0)
};

// Detects t0 as the slice of largest sup growth (refined by bisection for callables), runs
// the summability test at the class threshold around it and measures the minorant floor.
ClassVerdict classify_field(const SpaceTimeFunction &v, const Grid &sampling,
                            const MediumParams &params, Equation eq = Equation::PLaplace,
                            const ClassifyOptions &options = {});
ClassVerdict classify_field(const ScalarField &field, const MediumParams &params,
                            Equation eq = Equation::PLaplace, const ClassifyOptions &options = {});

struct BoundaryCheckOptions
{
  std::optional<double> threshold;  // default 1e6 * max(1, sup of the last slice)
  int approach_levels = 40;         // extra samples at t_jump + dt 2^{-i}
};

// True iff samples next to the lateral boundary stay below the threshold.
bool boundary_boundedness_check(const ScalarField &field, const BoundaryCheckOptions &options = {});
bool boundary_boundedness_check(const SpaceTimeFunction &v, const Grid &sampling,
                                const BoundaryCheckOptions &options = {});

struct HarnackSample
{
  Point x0 = Point::Zero();
  double t0 = 0.0;
  double R = 0.0;
  double theta = 0.0;
  double lhs = 0.0;  // u(x0, t0)
  double rhs = 0.0;  // inf over B_R(x0) of u(., t0 + theta)
};

struct HarnackOptions
{
  double C_used = 1.0;
  int samples = 200;
  std::uint64_t seed = 1;
  int attempts_per_sample = 50;
  int ball_points = 33;  // lattice points per axis for infima and positivity checks
};

struct HarnackReport
{
  std::vector<HarnackSample> samples;
  double gamma_measured = 0.0;
  double C_used = 0.0;
  int skipped = 0;
};

// theta = C R^p / u^{p-2} (PME: C R^2 / u^{m-1}); admissible iff B(x0, 4R) x (t0 - 4 theta,
// t0 + 4 theta) fits in the domain grid and u > 0 there. ConfigError if none is admissible.
HarnackReport harnack_check(const SpaceTimeFunction &u, const Grid &domain,
                            const MediumParams &params, Equation eq = Equation::PLaplace,
                            const HarnackOptions &options = {});

// Smooth bump exp(1 - 1/(1 - |x-c|^2/r^2)) supported in the ball of radius r.
struct Cutoff
{
  Point center = Point::Zero();
  double radius = 1.0;

  double value(const Point &x, int dims) const;
  Point gradient(const Point &x, int dims) const;
};

struct CaccioppoliReport
{
  double energy = 0.0;       // int int zeta^p |grad u|^p
  double sup_slice = 0.0;    // sup_t int zeta^p u^2
  double lhs = 0.0;          // energy + sup_slice
  double cutoff_term = 0.0;  // int int u^p |grad zeta|^p
  double initial_slice = 0.0;  // int zeta^p u^2 at t1
  double rhs = 0.0;          // cutoff_term + initial_slice
  double bracket_difference = 0.0;  // cutoff_term + [int zeta^p u^2]_{t1}^{t2}
  double ratio = 0.0;        // lhs / rhs
};

// Energy terms over slices with t1 <= t <= t2. ContractError if the cutoff support leaves
// the spatial domain or the field is negative.
CaccioppoliReport caccioppoli_check(const ScalarField &field, const Cutoff &zeta, double t1,
                                    double t2, double p);

}  // namespace slowdiff
