// Copyright 2026 The slowdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "slowdiff/core.hpp"

namespace slowdiff
{

// Positive profile of a separable solution v = U(x) / (t - t0)^{decay}.
//
// p-Laplace: U solves div(|grad U|^{p-2} grad U) + U/(p-2) = 0, U = normC * w with w the
// minimizer of  int |grad w|^p / (int w^2)^{p/2}  on the unit L^2 sphere and
// J0 * normC^{p-2} = 1/(p-2).
//
// PME: U = G solves Lap(G^m) + G/(m-1) = 0, G = normC * u with u the minimizer of
// int |grad u^m|^2 / int u^{m+1}  on the unit L^{m+1} sphere and J0 * normC^{m-1} = 1/(m-1).
struct EigenResult
{
  Grid grid;  // spatial grid; boundary nodes carry zero
  Equation equation = Equation::PLaplace;
  MediumParams params;
  Eigen::VectorXd U;         // normalized profile at all grid nodes
  Eigen::VectorXd w;         // minimizer on the unit sphere
  double J0 = 0.0;
  double normC = 0.0;
  double residual = 0.0;     // relative discrete Euler-Lagrange residual (l2)
  int iterations = 0;
  std::vector<double> history;  // quotient value after each accepted step

  double max() const { return U.maxCoeff(); }
  double decay_exponent() const;
  // Linear (bilinear) interpolation of U; DomainError outside the grid.
  double value_at(const Point &x) const;
  bool contains(const Point &x) const;
};

struct MinimizerOptions
{
  double rel_tol = 1e-10;
  double residual_tol = 1e-6;
  int max_iterations = 100000;
  std::optional<Eigen::VectorXd> initial_guess;  // full nodal vector; |guess| is used
};

EigenResult minimize_quotient(const Grid &domain, const MediumParams &params,
                              Equation eq, const MinimizerOptions &options = {});

// Discrete quotient on a nodal vector (boundary entries ignored):
// p-Laplace  int |grad w|^p / (int w^2)^{p/2};  PME  int |grad u^m|^2 / (int u^{m+1})^{2m/(m+1)},
// which equals the PME variational integral on the unit L^{m+1} sphere.
double discrete_quotient(const Grid &domain, const Eigen::VectorXd &w, const MediumParams &params,
                         Equation eq);

// Relative l2 norm of L(U) + U/(p-2) (PME: Lap_h(U^m) + U/(m-1)) over interior nodes,
// with L the discrete operator whose energy the minimizer descends.
double euler_lagrange_residual(const Grid &domain, const Eigen::VectorXd &U,
                               const MediumParams &params, Equation eq);

// One-dimensional p-Laplace profile on [0, L] via the first integral
// ((p-1)/p)|U'|^p + U^2/(2(p-2)) = const.
struct FirstIntegral1D
{
  double p = 0.0;
  double L = 0.0;
  double M = 0.0;                     // max U = U(L/2)
  double C1 = 0.0;                    // M = C1 L^{p/(p-2)}
  double C2 = 0.0;                    // U'(0) = C2 L^{2/(p-2)}
  double slope0 = 0.0;                // U'(0)
  double integration_constant = 0.0;  // M^2 / (2(p-2))
  double shape_integral = 0.0;        // int_0^1 (1-s^2)^{-1/p} ds by quadrature after s = sin(phi)
};

FirstIntegral1D first_integral_oracle(double p, double L);

// Nodal U on `cells`+1 uniform nodes of [0, L], by inverting x(U).
Eigen::VectorXd profile_from_first_integral(double p, double L, int cells);

// One-dimensional Friendly Giant via w = G^m and (1/2)w'^2 + (m/(m+1)) w^{(m+1)/m}/(m-1) = const.
struct GiantFirstIntegral1D
{
  double m = 0.0;
  double L = 0.0;
  double W = 0.0;       // max of G^m
  double Gmax = 0.0;    // W^{1/m}
  double slope0 = 0.0;  // (G^m)'(0)
  double integration_constant = 0.0;
};

GiantFirstIntegral1D giant_first_integral_oracle(double m, double L);
Eigen::VectorXd giant_profile_from_first_integral(double m, double L, int cells);

// int_0^g sin(psi)^a dpsi for a in (0, 1], with geometric grading toward psi = 0.
double sine_power_integral(double a, double g);

}  // namespace slowdiff
