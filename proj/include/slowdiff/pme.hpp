// Copyright 2026 The slowdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include "slowdiff/core.hpp"
#include "slowdiff/diagnostics.hpp"
#include "slowdiff/eigenfunctions.hpp"

namespace slowdiff
{

// Friendly Giant separable solution G(x) / (t - t0)^{1/(m-1)}, zero for t <= t0.
struct PMESeparableSpec
{
  EigenResult giant;
  double t0 = 0.0;
};

// Solves the giant eigenproblem on the domain and wraps it.
PMESeparableSpec make_pme_separable(const Grid &domain, const MediumParams &params, double t0,
                                    const MinimizerOptions &options = {});

double pme_separable_eval(const PMESeparableSpec &spec, const Point &x, double t);
SpaceTimeFunction pme_separable_function(const PMESeparableSpec &spec);

// classify_field with threshold m - 1 and weight (t - t0)^{1/(m-1)}.
ClassVerdict pme_classify(const ScalarField &field, const MediumParams &params,
                          const ClassifyOptions &options = {});
ClassVerdict pme_classify(const SpaceTimeFunction &v, const Grid &sampling,
                          const MediumParams &params, const ClassifyOptions &options = {});

// int int |grad min(v^m, j)|^2 over the cells and slices inside the window (cellwise
// gradients, trapezoid in time).
double pme_truncation_gradient_check(const ScalarField &field, double m, double j,
                                     const Cylinder &window);

// Self-similar PME source solution t^{-alpha} F(x t^{-beta}), alpha = n / lambda,
// beta = 1 / lambda, lambda = n(m-1)+2. F is the numerically evolved profile of a narrow
// bump of the given mass at t = 1; there is no closed form behind it.
struct PMEProfile
{
  MediumParams params;
  Grid grid;  // spatial nodes in xi (interval for n = 1, radial otherwise)
  Eigen::VectorXd F;
  double mass = 1.0;
  double alpha = 0.0;
  double beta = 0.0;

  double profile(double xi) const;           // F(|xi|), zero off the grid
  double power_derivative(double xi) const;  // d/dxi F^m (cellwise, non-positive for xi > 0)
  double support_radius() const;             // last node with F > 0
};

struct PMEProfileOptions
{
  double mass = 1.0;
  double extent = 4.0;     // grid covers |x| <= extent
  int cells = 1024;        // cells across the interval (n = 1) or [0, extent] (radial)
  double bump_cells = 4.0; // initial half-width in cells
};

PMEProfile evolve_pme_profile(const MediumParams &params, const PMEProfileOptions &options = {});

double pme_profile_eval(const PMEProfile &profile, const Point &x, double t);
// |grad v^m| of the self-similar solution.
double pme_profile_power_gradient(const PMEProfile &profile, const Point &x, double t);
SpaceTimeFunction pme_profile_function(const PMEProfile &profile);

}  // namespace slowdiff
