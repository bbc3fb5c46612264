#pragma once

#include "ricci2d/field.hpp"
#include "ricci2d/flow.hpp"

#include <string>
#include <vector>

namespace ricci2d {

/// Choice of the initial potential f0 with lap_g0 f0 = R0. With
/// lap_g = e^{-u} lap this reads lap f0 = -lap u0, so f0 = -u0 + harmonic.
struct PotentialGauge
{
  enum class Kind { NegU0, PoissonSolve };
  Kind kind = Kind::NegU0;
  double harmonic_offset = 0.0;
};

std::string to_string(PotentialGauge::Kind kind);
PotentialGauge::Kind parse_gauge(const std::string &text);

/// NegU0 returns -u0 + c. PoissonSolve solves lap f0 = -lap u0 with Dirichlet
/// data -u0 + c and certifies ||lap f0 + lap u0|| < 1e-8 on interior nodes.
/// Throws Error("poisson-not-converged").
ScalarField solve_initial_potential(const ConformalField &m0, const PotentialGauge &gauge,
                                    std::vector<std::string> *warnings = nullptr);

/// True when f0 keeps growing across the outer quarter of the grid, i.e. the
/// sampled potential does not look bounded.
bool looks_unbounded(const ScalarField &f0);

/// One step of f_t = e^{-u} lap f with the metric frozen at the start of the
/// step: forward Euler under the flow's CFL bound, or backward Euler.
/// Boundary nodes are held fixed unless the grid is Neumann0.
/// Throws Error("cfl-violated") for an explicit step above the bound.
ScalarField step_heat(const ScalarField &f, const ConformalField &m, double dt, Scheme scheme,
                      double cfl_fraction = 1.0);

/// ||e^{-u} lap f - R|| over interior nodes.
double identity_residual(const ScalarField &f, const ConformalField &m);

/// F = t e^{-u} |grad f|^2 + f^2.
ScalarField monotone_quantity(const ScalarField &f, const ConformalField &m, double t);

struct MonitorReport
{
  double t = 0.0;
  double sup_abs_f = 0.0;
  double sup_F = 0.0;
  double sup_gradf2_g = 0.0; ///< sup e^{-u} |grad f|^2
  double identity_residual = 0.0;
};

MonitorReport potential_monitors(const ScalarField &f, const ConformalField &m, double t);

struct MaxPrincipleResult
{
  bool holds = true;
  double worst_excess = 0.0; ///< largest sup|f(t)| above the allowed bound (0 when none)
  Index worst_index = -1;
};

/// sup|f(t)| <= sup|f(0)| (1 + 1e-6) + 10 h^2 at every recorded time; the
/// first entry is taken as t = 0.
MaxPrincipleResult max_principle_check(const std::vector<double> &sup_abs_f, double h);

} // namespace ricci2d
