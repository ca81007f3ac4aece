// Copyright 2026 The slowdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "slowdiff/core.hpp"

namespace slowdiff
{

enum class BoundaryKind
{
  Dirichlet,
  ZeroFlux
};

// Data on one end of an interval (or the outer end of a radial grid).
struct BoundaryData
{
  BoundaryKind kind = BoundaryKind::Dirichlet;
  std::function<double(double)> value;  // Dirichlet value as a function of time

  static BoundaryData dirichlet(double c);
  static BoundaryData dirichlet(std::function<double(double)> fn);
  // Piecewise linear in time through (times[k], values[k]); constant beyond the ends.
  static BoundaryData series(std::vector<double> times, std::vector<double> values);
  static BoundaryData zero_flux();

  double at(double t) const;
};

// Nodes whose values are prescribed for all times (ring construction: the inner box).
struct HeldRegion
{
  std::vector<int> nodes;
  SpaceTimeFunction value;
  std::vector<int> hidden;  // held nodes not part of the solution domain (stored as 0)
};

struct EvolutionProblem
{
  MediumParams params;
  Equation equation = Equation::PLaplace;
  // Spatial layout (Interval or Radial) plus output time axis t0 + k*dt, k = 0..steps.
  Grid grid;
  Eigen::VectorXd initial;
  BoundaryData left = BoundaryData::dirichlet(0.0);  // ignored on radial grids (symmetry)
  BoundaryData right = BoundaryData::dirichlet(0.0);
  std::optional<HeldRegion> held;
  double cfl = 0.9;
  std::optional<double> blow_up_threshold;  // default 1e6 * sup of initial and boundary data
  double dt_min = 1e-14;
  // Steps are subdivided while prescribed data jumps by more than this factor over
  // max(current data, threshold * 1e-3).
  double data_jump_factor = 4.0;

  void validate() const;
};

struct SolveReport
{
  ScalarField field;               // output slices up to the last completed one
  std::vector<double> step_times;  // time after each internal step
  std::vector<double> max_trace;   // solution max after each internal step
  std::vector<double> dt_trace;
  bool blow_up_flag = false;
  std::optional<double> blow_up_time;
  double threshold = 0.0;
  int forced_steps = 0;  // data jumps accepted at dt_min

  int internal_steps() const { return static_cast<int>(dt_trace.size()); }
};

// Explicit conservative monotone stepping of a single problem.
class Stepper
{
public:
  explicit Stepper(const EvolutionProblem &problem);

  const Eigen::VectorXd &state() const { return u_; }
  double time() const { return t_; }
  // Largest step keeping the update monotone for the current state.
  double stable_dt() const;
  // Applies prescribed data at time t to boundary and held nodes.
  void impose(Eigen::VectorXd &u, double t) const;
  Eigen::VectorXd prescribed_at(double t) const;  // NaN where free
  // Steps to time_after (= time() + dt up to rounding; passed to land on output times).
  void advance(double dt, double time_after);
  // Max over solution nodes (held boundary nodes included, hidden nodes excluded).
  double solution_max() const;
  Eigen::VectorXd output_state() const;

private:
  void build_geometry();

  EvolutionProblem problem_;
  Eigen::VectorXd u_;
  double t_ = 0.0;
  std::vector<char> fixed_;   // Dirichlet or held
  std::vector<char> hidden_;
  Eigen::VectorXd volume_;    // node cell measure
  Eigen::VectorXd face_;      // face area at i+1/2, i = 0..N-2
  bool left_flux_ = false, right_flux_ = false;
};

SolveReport evolve(const EvolutionProblem &problem);

// Interval [-2l, 2l] with zero data at +-2l and h = v on the inner box [-l, l], zero initial
// data. The inner box must be aligned with grid nodes.
struct RingSpec
{
  double l = 0.5;
  MediumParams params;
  Equation equation = Equation::PLaplace;
  int cells = 256;     // cells across [-2l, 2l]
  double t_end = 1.0;
  int output_steps = 200;
  SpaceTimeFunction inner;  // trace v(x, t), read at x = -l and x = l
  double delta = 0.0;       // v is taken as 0 for t <= delta
  double cfl = 0.9;
  std::optional<double> threshold;  // default 1e3 * median of positive trace samples
};

SolveReport solve_ring(const RingSpec &spec);
// Threshold used by solve_ring when none is given.
double ring_default_threshold(const RingSpec &spec);

struct ComparisonReport
{
  bool ordered = true;
  double max_violation = 0.0;  // max(u_A - u_B) over all nodes and steps (<= 0 if ordered)
  std::vector<double> times;
  std::vector<double> max_gap;  // max(u_B - u_A) after each step
  bool min_positive = true;     // both runs stayed non-negative
};

// Evolves both problems in lockstep with a common monotone step. ContractError unless
// A's initial and boundary data are below B's.
ComparisonReport comparison_check(const EvolutionProblem &a, const EvolutionProblem &b,
                                  double slack = 1e-12);

}  // namespace slowdiff
