#pragma once

#include "ricci2d/field.hpp"
#include "ricci2d/operators.hpp"

#include <functional>
#include <vector>

namespace ricci2d {

enum class Scheme { ExplicitCFL, ImplicitNewton };

std::string to_string(Scheme scheme);
Scheme parse_scheme(const std::string &text);

struct SolverConfig
{
  Scheme scheme = Scheme::ImplicitNewton;
  double dt_max = 1.0;
  double cfl_fraction = 0.5; ///< theta in dt = theta h^2 min(e^u) / 4
  double newton_tol = 1e-10;
  int newton_max_iter = 30;
  double t_end = 1.0;
  int monitor_stride = 0;    ///< record every k steps; 0 selects the geometric schedule
  double dt_min = 1e-3;      ///< implicit: first and smallest step
  double dt_relative = 0.02; ///< implicit: dt <= dt_relative * t once t is large enough

  void validate() const;
};

/// Exact boundary data u(x, y, t) for BoundaryModel::Prescribed.
using BoundaryData = std::function<double(double x, double y, double t)>;

/// State of one run: time, metric, potential f and integrated potential psi.
struct FlowState
{
  double t = 0.0;
  ConformalField m;
  ScalarField f;
  ScalarField psi;
  long step_count = 0;
};

// ---------------------------------------------------------------------------
// Global existence

enum class Existence { Global, FiniteTime, Undetermined };
std::string to_string(Existence e);

struct ExistenceVerdict
{
  Existence verdict = Existence::Undetermined;
  double area_inner = 0.0;    ///< int e^{u0} over the computed disk
  double tail_exponent = 0.0; ///< p in e^{u0} ~ c rho^{-p}
  double tail_residual = 0.0; ///< RMS of the log-log tail fit
  double area_total = 0.0;    ///< area_inner plus the fitted tail (infinite when p <= 2)
};

/// The flow exists for all time iff int e^{u0} dx is infinite. Fits the tail
/// of e^{u0} on the outer quarter of the domain (angular averages on
/// Cartesian grids); p <= 2 means a divergent integral.
ExistenceVerdict classify_global_existence(const ConformalField &m0, double residual_tolerance = 0.05);

// ---------------------------------------------------------------------------
// Steppers

/// Largest explicit step: theta h^2 min(e^u) / 4.
double explicit_stable_dt(const ConformalField &m, const SolverConfig &cfg);

/// One explicit step of u_t = e^{-u} lap u with dt = min(dt_max, CFL bound).
/// Throws Error("positivity-lost") if e^u is no longer positive and finite.
FlowState step_explicit(const FlowState &s, const SolverConfig &cfg, const BoundaryData &boundary = {});

struct NewtonReport
{
  int iterations = 0;
  double residual = 0.0;
};

/// Backward Euler for v_t = lap log v: solves v_new - dt lap(log v_new) = v_old
/// by Newton on the log-increment delta = u_new - u_old.
/// Throws Error("newton-diverged").
FlowState step_implicit(const FlowState &s, double dt, const SolverConfig &cfg, const BoundaryData &boundary = {},
                        NewtonReport *report = nullptr);

/// In-place explicit integrator for long CFL-limited runs. Keeps e^{-u} up to
/// date multiplicatively (resynchronised with exp periodically), so a step
/// costs two sweeps and no transcendental calls.
class ExplicitIntegrator
{
public:
  ExplicitIntegrator(const GridSpec &grid, const SolverConfig &cfg, BoundaryData boundary = {});

  /// Re-reads u (call after modifying u outside step()).
  void reset(const Eigen::VectorXd &u);

  /// Advances u from time t by min(dt_cap, CFL bound); returns the step taken.
  double step(Eigen::VectorXd &u, double t, double dt_cap);

  double stable_dt() const;
  /// e^{-u} of the current state.
  const Eigen::VectorXd &inverse_factor() const { return w_; }

private:
  GridSpec grid_;
  SolverConfig cfg_;
  BoundaryData boundary_;
  LaplacianOperator lap_op_;
  Eigen::VectorXd w_, lap_;
  Eigen::VectorXd next_;
  Eigen::VectorXd cm_, cp_; // radial interior weights
  std::vector<Index> boundary_nodes_;
  std::vector<char> fixed_;
  double max_w_ = 0.0;
  long steps_since_sync_ = 0;
};

} // namespace ricci2d
