// Copyright 2026 The slowdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "slowdiff/eigenfunctions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "slowdiff/quadrature.hpp"

namespace slowdiff
{

double EigenResult::decay_exponent() const
{
  return equation == Equation::PLaplace ? 1.0 / (params.p - 2.0) : 1.0 / (*params.m - 1.0);
}

bool EigenResult::contains(const Point &x) const
{
  const double tol = 1e-12 * grid.h;
  for (int a = 0; a < grid.spatial_dims(); ++a)
  {
    if (x[a] < grid.origin[a] - tol || x[a] > grid.coord(a, grid.counts[a] - 1) + tol)
    {
      return false;
    }
  }
  return true;
}

double EigenResult::value_at(const Point &x) const
{
  if (!contains(x))
  {
    throw DomainError("point outside the eigenfunction domain");
  }
  auto locate = [&](int axis, int &i, double &w) {
    const int nodes = grid.counts[axis];
    const double s = (x[axis] - grid.origin[axis]) / grid.h;
    i = std::clamp(static_cast<int>(std::floor(s)), 0, nodes - 2);
    w = std::clamp(s - i, 0.0, 1.0);
  };
  int ix = 0, iy = 0;
  double wx = 0.0, wy = 0.0;
  locate(0, ix, wx);
  if (grid.spatial_dims() == 1)
  {
    return (1.0 - wx) * U[ix] + wx * U[ix + 1];
  }
  locate(1, iy, wy);
  auto at = [&](int a, int b) { return U[grid.flat_index(a, b)]; };
  return (1.0 - wy) * ((1.0 - wx) * at(ix, iy) + wx * at(ix + 1, iy)) +
         wy * ((1.0 - wx) * at(ix, iy + 1) + wx * at(ix + 1, iy + 1));
}

namespace
{

constexpr double kQuotientNoise = 64.0 * std::numeric_limits<double>::epsilon();

struct Edge
{
  int a, b;
  double c;
  int cell;
};

// Discrete energy  sum_cells |cell| (g^2)^{P/2}  with g^2 assembled from edge differences,
// and denominator  sum_nodes |node| |w|^s.
class QuotientModel
{
public:
  QuotientModel(const Grid &g, double P, double s) : grid_(g), P_(P), s_(s)
  {
    const int nx = g.counts[0], ny = g.counts[1];
    const int dims = g.spatial_dims();
    cell_measure_ = std::pow(g.h, dims);
    if (dims == 1)
    {
      cells_ = nx - 1;
      for (int i = 0; i + 1 < nx; ++i)
      {
        edges_.push_back({i, i + 1, 1.0, i});
      }
    }
    else
    {
      cells_ = (nx - 1) * (ny - 1);
      for (int j = 0; j + 1 < ny; ++j)
      {
        for (int i = 0; i + 1 < nx; ++i)
        {
          const int cell = i + (nx - 1) * j;
          const int n00 = g.flat_index(i, j), n10 = g.flat_index(i + 1, j);
          const int n01 = g.flat_index(i, j + 1), n11 = g.flat_index(i + 1, j + 1);
          edges_.push_back({n00, n10, 0.5, cell});
          edges_.push_back({n01, n11, 0.5, cell});
          edges_.push_back({n00, n01, 0.5, cell});
          edges_.push_back({n10, n11, 0.5, cell});
        }
      }
    }
    unknown_.assign(g.space_size(), -1);
    for (int j = 0; j < ny; ++j)
    {
      for (int i = 0; i < nx; ++i)
      {
        const bool boundary =
            i == 0 || i == nx - 1 || (dims == 2 && (j == 0 || j == ny - 1));
        if (!boundary)
        {
          unknown_[g.flat_index(i, j)] = unknowns_++;
        }
      }
    }
  }

  int unknowns() const { return unknowns_; }
  bool interior(int node) const { return unknown_[node] >= 0; }

  Eigen::VectorXd cell_g2(const Eigen::VectorXd &w) const
  {
    Eigen::VectorXd g2 = Eigen::VectorXd::Zero(cells_);
    for (const Edge &e : edges_)
    {
      const double d = (value(w, e.b) - value(w, e.a)) / grid_.h;
      g2[e.cell] += e.c * d * d;
    }
    return g2;
  }

  double energy(const Eigen::VectorXd &w) const
  {
    const Eigen::VectorXd g2 = cell_g2(w);
    double e = 0.0;
    for (int c = 0; c < cells_; ++c)
    {
      e += cell_measure_ * std::pow(g2[c], 0.5 * P_);
    }
    return e;
  }

  Eigen::VectorXd energy_gradient(const Eigen::VectorXd &w) const
  {
    const Eigen::VectorXd g2 = cell_g2(w);
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(w.size());
    for (const Edge &e : edges_)
    {
      const double d = (value(w, e.b) - value(w, e.a)) / grid_.h;
      const double dE = cell_measure_ * 0.5 * P_ * power_or_zero(g2[e.cell], 0.5 * P_ - 1.0);
      const double contrib = dE * 2.0 * e.c * d / grid_.h;
      grad[e.b] += contrib;
      grad[e.a] -= contrib;
    }
    mask(grad);
    return grad;
  }

  double denominator(const Eigen::VectorXd &w) const
  {
    double s = 0.0;
    for (int i = 0; i < w.size(); ++i)
    {
      if (interior(i))
      {
        s += std::pow(std::abs(w[i]), s_);
      }
    }
    return cell_measure_ * s;
  }

  Eigen::VectorXd denominator_gradient(const Eigen::VectorXd &w) const
  {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(w.size());
    for (int i = 0; i < w.size(); ++i)
    {
      if (interior(i) && w[i] != 0.0)
      {
        grad[i] = cell_measure_ * s_ * std::pow(std::abs(w[i]), s_ - 1.0) *
                  (w[i] > 0 ? 1.0 : -1.0);
      }
    }
    return grad;
  }

  double quotient(const Eigen::VectorXd &w) const
  {
    return energy(w) / std::pow(denominator(w), P_ / s_);
  }

  Eigen::VectorXd quotient_gradient(const Eigen::VectorXd &w) const
  {
    const double S = denominator(w);
    const double Q = energy(w) / std::pow(S, P_ / s_);
    const Eigen::VectorXd gE = energy_gradient(w);
    const Eigen::VectorXd gS = denominator_gradient(w);
    return (gE - Q * (P_ / s_) * std::pow(S, P_ / s_ - 1.0) * gS) / std::pow(S, P_ / s_);
  }

  // L(w) = -dE/dw / (P |node|): the discrete (p-)Laplacian matching this energy.
  Eigen::VectorXd operator_of(const Eigen::VectorXd &w) const
  {
    return -energy_gradient(w) / (P_ * cell_measure_);
  }

  void normalize(Eigen::VectorXd &w) const { w /= std::pow(denominator(w), 1.0 / s_); }

  // Weighted stiffness approximating the Hessian of E, restricted to interior unknowns.
  Eigen::SparseMatrix<double> preconditioner(const Eigen::VectorXd &w) const
  {
    const Eigen::VectorXd g2 = cell_g2(w);
    const double gmax = g2.size() ? g2.maxCoeff() : 0.0;
    const double floor = gmax > 0.0 ? 1e-10 * gmax : 1.0;
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(4 * edges_.size());
    for (const Edge &e : edges_)
    {
      const double weight = cell_measure_ * 0.5 * P_ * (P_ - 1.0) *
                            std::pow(std::max(g2[e.cell], floor), 0.5 * P_ - 1.0) * 2.0 *
                            e.c / (grid_.h * grid_.h);
      const int ia = unknown_[e.a], ib = unknown_[e.b];
      if (ia >= 0)
      {
        triplets.emplace_back(ia, ia, weight);
      }
      if (ib >= 0)
      {
        triplets.emplace_back(ib, ib, weight);
      }
      if (ia >= 0 && ib >= 0)
      {
        triplets.emplace_back(ia, ib, -weight);
        triplets.emplace_back(ib, ia, -weight);
      }
    }
    Eigen::SparseMatrix<double> A(unknowns_, unknowns_);
    A.setFromTriplets(triplets.begin(), triplets.end());
    return A;
  }

  Eigen::VectorXd gather(const Eigen::VectorXd &full) const
  {
    Eigen::VectorXd r(unknowns_);
    for (int i = 0; i < full.size(); ++i)
    {
      if (unknown_[i] >= 0)
      {
        r[unknown_[i]] = full[i];
      }
    }
    return r;
  }

  Eigen::VectorXd scatter(const Eigen::VectorXd &reduced) const
  {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(grid_.space_size());
    for (int i = 0; i < full.size(); ++i)
    {
      if (unknown_[i] >= 0)
      {
        full[i] = reduced[unknown_[i]];
      }
    }
    return full;
  }

  void mask(Eigen::VectorXd &v) const
  {
    for (int i = 0; i < v.size(); ++i)
    {
      if (unknown_[i] < 0)
      {
        v[i] = 0.0;
      }
    }
  }

private:
  double value(const Eigen::VectorXd &w, int node) const
  {
    return unknown_[node] >= 0 ? w[node] : 0.0;
  }

  static double power_or_zero(double x, double e) { return e == 0.0 ? 1.0 : (x > 0.0 ? std::pow(x, e) : 0.0); }

  const Grid &grid_;
  double P_, s_;
  double cell_measure_ = 1.0;
  int cells_ = 0;
  int unknowns_ = 0;
  std::vector<Edge> edges_;
  std::vector<int> unknown_;
};

struct Exponents
{
  double P;  // gradient power in the numerator
  double s;  // power in the denominator
};

Exponents exponents_for(const MediumParams &params, Equation eq)
{
  if (eq == Equation::PLaplace)
  {
    return {params.p, 2.0};
  }
  return {2.0, (*params.m + 1.0) / *params.m};
}

Eigen::VectorXd default_guess(const Grid &g)
{
  Eigen::VectorXd guess(g.space_size());
  for (int i = 0; i < g.space_size(); ++i)
  {
    const Point x = g.node(i);
    double v = 1.0;
    for (int a = 0; a < g.spatial_dims(); ++a)
    {
      const double len = g.h * (g.counts[a] - 1);
      v *= std::sin(std::numbers::pi * (x[a] - g.origin[a]) / len);
    }
    guess[i] = std::max(v, 0.0);
  }
  return guess;
}

// Profile U from the sphere minimizer in the variable the model works with.
Eigen::VectorXd profile_from_minimizer(const Eigen::VectorXd &w, double J0,
                                       const MediumParams &params, Equation eq, double &normC)
{
  if (eq == Equation::PLaplace)
  {
    const double p = params.p;
    normC = std::pow(1.0 / ((p - 2.0) * J0), 1.0 / (p - 2.0));
    return normC * w;
  }
  const double m = *params.m;
  normC = std::pow(1.0 / ((m - 1.0) * J0), 1.0 / (m - 1.0));
  return normC * w.array().max(0.0).pow(1.0 / m).matrix();
}

}  // namespace

double discrete_quotient(const Grid &domain, const Eigen::VectorXd &w, const MediumParams &params,
                         Equation eq)
{
  params.validate(eq);
  const Exponents ex = exponents_for(params, eq);
  QuotientModel model(domain, ex.P, ex.s);
  if (eq == Equation::PLaplace)
  {
    return model.quotient(w);
  }
  const Eigen::VectorXd wm = w.array().abs().pow(*params.m).matrix();
  return model.quotient(wm);
}

double euler_lagrange_residual(const Grid &domain, const Eigen::VectorXd &U,
                               const MediumParams &params, Equation eq)
{
  params.validate(eq);
  const Exponents ex = exponents_for(params, eq);
  QuotientModel model(domain, ex.P, ex.s);
  Eigen::VectorXd r, source;
  if (eq == Equation::PLaplace)
  {
    source = U / (params.p - 2.0);
    r = model.operator_of(U) + source;
  }
  else
  {
    const double m = *params.m;
    source = U / (m - 1.0);
    r = model.operator_of(U.array().abs().pow(m).matrix()) + source;
  }
  model.mask(r);
  model.mask(source);
  const double denom = source.norm();
  return denom > 0.0 ? r.norm() / denom : r.norm();
}

EigenResult minimize_quotient(const Grid &domain, const MediumParams &params, Equation eq,
                              const MinimizerOptions &options)
{
  params.validate(eq);
  Grid g = domain.spatial();
  if (g.kind == GridKind::Radial)
  {
    throw DomainError("minimize_quotient needs an interval or box domain");
  }
  const Exponents ex = exponents_for(params, eq);
  QuotientModel model(g, ex.P, ex.s);
  if (model.unknowns() < 1)
  {
    throw DomainError("domain has no interior nodes");
  }

  Eigen::VectorXd w;
  if (options.initial_guess)
  {
    if (options.initial_guess->size() != g.space_size())
    {
      throw ContractError("initial guess does not match the domain grid");
    }
    w = options.initial_guess->cwiseAbs();
    if (eq == Equation::PME)
    {
      w = w.array().pow(*params.m).matrix();
    }
  }
  else
  {
    w = default_guess(g);
  }
  model.mask(w);
  if (model.denominator(w) <= 0.0)
  {
    throw ContractError("initial guess vanishes on the interior");
  }
  model.normalize(w);

  EigenResult result;
  result.grid = g;
  result.equation = eq;
  result.params = params;

  double Q = model.quotient(w);
  result.history.push_back(Q);
  auto residual_of = [&](const Eigen::VectorXd &cur, double J) {
    double normC = 0.0;
    const Eigen::VectorXd U = profile_from_minimizer(cur, J, params, eq, normC);
    return euler_lagrange_residual(g, U, params, eq);
  };

  double residual = residual_of(w, Q);
  bool converged = false;
  int it = 0;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
  for (; it < options.max_iterations; ++it)
  {
    const Eigen::VectorXd grad = model.quotient_gradient(w);
    const Eigen::SparseMatrix<double> A =
        model.preconditioner(w) / std::pow(model.denominator(w), ex.P / ex.s);
    solver.compute(A);
    Eigen::VectorXd dir;
    if (solver.info() == Eigen::Success)
    {
      dir = model.scatter(solver.solve(model.gather(-grad)));
    }
    double slope = grad.dot(dir);
    if (!(slope < 0.0) || !dir.allFinite())
    {
      dir = -grad;
      slope = -grad.squaredNorm();
    }
    if (slope == 0.0)
    {
      converged = residual < options.residual_tol;
      break;
    }

    double alpha = 1.0;
    bool accepted = false;
    Eigen::VectorXd trial;
    double Qt = Q;
    for (int ls = 0; ls < 60; ++ls)
    {
      trial = (w + alpha * dir).cwiseAbs();
      model.mask(trial);
      if (model.denominator(trial) > 0.0)
      {
        model.normalize(trial);
        Qt = model.quotient(trial);
        if (Qt < Q && Qt <= Q + 1e-4 * alpha * slope)
        {
          accepted = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    double trial_residual = 0.0;
    if (!accepted)
    {
      // Armijo is below the rounding floor of Q; keep the full step if Q moves by no more
      // than its evaluation noise and the stationarity residual still drops.
      trial = (w + dir).cwiseAbs();
      model.mask(trial);
      if (model.denominator(trial) > 0.0)
      {
        model.normalize(trial);
        Qt = model.quotient(trial);
        trial_residual = residual_of(trial, Qt);
        accepted = Qt <= Q * (1.0 + kQuotientNoise) && trial_residual < residual;
      }
      if (!accepted)
      {
        converged = residual < options.residual_tol;
        break;
      }
    }
    else
    {
      trial_residual = residual_of(trial, Qt);
    }
    const double rel = (Q - Qt) / Qt;
    w = trial;
    Q = Qt;
    result.history.push_back(Q);
    residual = trial_residual;
    if (rel < options.rel_tol && residual < options.residual_tol)
    {
      converged = true;
      ++it;
      break;
    }
  }
  if (!converged)
  {
    throw ConvergenceError("quotient minimization did not converge", residual);
  }

  result.J0 = Q;
  result.iterations = it;
  result.U = profile_from_minimizer(w, Q, params, eq, result.normC);
  result.w = eq == Equation::PLaplace ? w : w.array().pow(1.0 / *params.m).matrix();
  result.residual = euler_lagrange_residual(g, result.U, params, eq);
  return result;
}

double sine_power_integral(double a, double g)
{
  static const quad::GaussLegendre<double> rule(20);
  return quad::graded_toward_right(
      [a](double, double gap) { return std::pow(std::sin(gap), a); }, 0.0, g, 52, rule);
}

namespace
{

// Solves F(x) = target for increasing F on [0, hi] with F' = dF; safeguarded Newton.
template <typename F, typename DF>
double invert_monotone(F &&f, DF &&df, double target, double hi)
{
  double lo = 0.0, up = hi;
  double x = 0.5 * hi;
  for (int it = 0; it < 200; ++it)
  {
    const double r = f(x) - target;
    if (r == 0.0)
    {
      return x;
    }
    if (r > 0.0)
    {
      up = x;
    }
    else
    {
      lo = x;
    }
    const double d = df(x);
    double next = d > 0.0 ? x - r / d : 0.5 * (lo + up);
    if (!(next > lo && next < up))
    {
      next = 0.5 * (lo + up);
    }
    if (std::abs(next - x) <= 1e-16 * std::max(1.0, std::abs(x)) || up - lo < 1e-17)
    {
      return next;
    }
    x = next;
  }
  return x;
}

void check_oracle_args(double exponent, double L, double lower, const char *name)
{
  if (!(exponent > lower) || !(L > 0.0))
  {
    throw ParameterError(std::string(name) + ": invalid exponent or length");
  }
}

}  // namespace

FirstIntegral1D first_integral_oracle(double p, double L)
{
  check_oracle_args(p, L, 2.0, "first_integral_oracle");
  FirstIntegral1D fi;
  fi.p = p;
  fi.L = L;
  // int_0^1 (1-s^2)^{-1/p} ds = int_0^{pi/2} cos(phi)^{1-2/p} dphi
  fi.shape_integral = sine_power_integral(1.0 - 2.0 / p, 0.5 * std::numbers::pi);
  if (!std::isfinite(fi.shape_integral) || !(fi.shape_integral > 0.0))
  {
    throw NumericError("first-integral quadrature failed");
  }
  const double K = 2.0 * (p - 1.0) * (p - 2.0) / p;
  // M^{(p-2)/p} K^{1/p} I = L/2
  fi.M = std::pow(L / (2.0 * fi.shape_integral * std::pow(K, 1.0 / p)), p / (p - 2.0));
  fi.slope0 = std::pow(fi.M * fi.M / K, 1.0 / p);
  fi.integration_constant = fi.M * fi.M / (2.0 * (p - 2.0));
  fi.C1 = fi.M / std::pow(L, p / (p - 2.0));
  fi.C2 = fi.slope0 / std::pow(L, 2.0 / (p - 2.0));
  return fi;
}

Eigen::VectorXd profile_from_first_integral(double p, double L, int cells)
{
  if (cells < 2)
  {
    throw DomainError("profile needs at least two cells");
  }
  const FirstIntegral1D fi = first_integral_oracle(p, L);
  const double a = 1.0 - 2.0 / p;
  const double I = fi.shape_integral;
  const double half_pi = 0.5 * std::numbers::pi;
  Eigen::VectorXd U = Eigen::VectorXd::Zero(cells + 1);
  for (int i = 1; 2 * i <= cells; ++i)
  {
    const double x = L * i / cells;
    // x = (L/2) (I - T(psi)) / I with T(psi) = int_0^psi sin^a, psi = pi/2 - phi, U = M cos(psi)
    const double target = I * (1.0 - x / (0.5 * L));
    const double psi =
        target <= 0.0
            ? 0.0
            : invert_monotone([a](double y) { return sine_power_integral(a, y); },
                              [a](double y) { return std::pow(std::sin(y), a); }, target,
                              half_pi);
    U[i] = fi.M * std::cos(psi);
    U[cells - i] = U[i];
  }
  return U;
}

GiantFirstIntegral1D giant_first_integral_oracle(double m, double L)
{
  check_oracle_args(m, L, 1.0, "giant_first_integral_oracle");
  GiantFirstIntegral1D gi;
  gi.m = m;
  gi.L = L;
  const double s = (m + 1.0) / m;
  const double K = m / ((m + 1.0) * (m - 1.0));
  const double b = 2.0 / s - 1.0;
  // int_0^1 (1-y^s)^{-1/2} dy = (2/s) int_0^{pi/2} sin(phi)^{2/s-1} dphi
  const double I = 2.0 / s * sine_power_integral(b, 0.5 * std::numbers::pi);
  gi.W = std::pow(L * std::sqrt(2.0 * K) / (2.0 * I), 1.0 / (1.0 - 0.5 * s));
  gi.Gmax = std::pow(gi.W, 1.0 / m);
  gi.slope0 = std::sqrt(2.0 * K) * std::pow(gi.W, 0.5 * s);
  gi.integration_constant = K * std::pow(gi.W, s);
  return gi;
}

Eigen::VectorXd giant_profile_from_first_integral(double m, double L, int cells)
{
  if (cells < 2)
  {
    throw DomainError("profile needs at least two cells");
  }
  const GiantFirstIntegral1D gi = giant_first_integral_oracle(m, L);
  const double s = (m + 1.0) / m;
  const double b = 2.0 / s - 1.0;
  const double half_pi = 0.5 * std::numbers::pi;
  const double T = sine_power_integral(b, half_pi);
  Eigen::VectorXd G = Eigen::VectorXd::Zero(cells + 1);
  for (int i = 1; 2 * i <= cells; ++i)
  {
    const double x = L * i / cells;
    const double target = T * x / (0.5 * L);
    const double phi =
        target >= T ? half_pi
                    : invert_monotone([b](double y) { return sine_power_integral(b, y); },
                                      [b](double y) { return std::pow(std::sin(y), b); },
                                      target, half_pi);
    const double w = gi.W * std::pow(std::sin(phi), 2.0 / s);
    G[i] = std::pow(w, 1.0 / m);
    G[cells - i] = G[i];
  }
  return G;
}

}  // namespace slowdiff
