#include "ricci2d/potential.hpp"
#include "ricci2d/detail/linear_system.hpp"
#include "ricci2d/error.hpp"
#include "ricci2d/geometry.hpp"
#include "ricci2d/operators.hpp"

#include <cmath>

namespace ricci2d {

std::string to_string(PotentialGauge::Kind kind)
{
  return kind == PotentialGauge::Kind::NegU0 ? "neg_u0" : "poisson";
}

PotentialGauge::Kind parse_gauge(const std::string &text)
{
  if (text == "neg_u0")
    return PotentialGauge::Kind::NegU0;
  if (text == "poisson")
    return PotentialGauge::Kind::PoissonSolve;
  throw Error("parameter-out-of-range", "unknown gauge '" + text + "'");
}

bool looks_unbounded(const ScalarField &f0)
{
  const GridSpec &grid = f0.grid;
  // Compare the boundary magnitude against the largest magnitude inside
  // three quarters of the extent.
  double inner = 0.0, edge = 0.0, edge_mid = 0.0;
  for (Index k = 0; k < f0.size(); ++k) {
    const double r = grid.position(k).norm();
    const double a = std::abs(f0.values[k]);
    if (r <= 0.75 * grid.extent)
      inner = std::max(inner, a);
    if (grid.on_boundary(k))
      edge = std::max(edge, a);
    if (r > 0.7 * grid.extent && r <= 0.75 * grid.extent)
      edge_mid = std::max(edge_mid, a);
  }
  return edge > inner + 1e-3 && edge > edge_mid + 1e-3;
}

ScalarField solve_initial_potential(const ConformalField &m0, const PotentialGauge &gauge,
                                    std::vector<std::string> *warnings)
{
  const GridSpec &grid = m0.grid();
  const Eigen::VectorXd direct = (-m0.u.values.array() + gauge.harmonic_offset).matrix();
  ScalarField f0(grid, direct);
  if (gauge.kind == PotentialGauge::Kind::PoissonSolve) {
    GridSpec dirichlet = grid;
    if (dirichlet.boundary == BoundaryModel::Neumann0)
      dirichlet.boundary = BoundaryModel::DirichletInitial;
    const LaplacianOperator lap(dirichlet);
    const auto fixed = detail::fixed_rows(dirichlet);
    Eigen::VectorXd rhs = lap(m0.u.values); // lap f0 = -lap u0  <=>  -lap f0 = lap u0
    for (Index k = 0; k < rhs.size(); ++k)
      rhs[k] = fixed[k] ? direct[k] : rhs[k];
    // (0 * I - 1 * L) f = lap u0 on interior rows; identity on the boundary.
    Eigen::VectorXd solved =
        detail::solve_shifted_laplacian(lap, Eigen::VectorXd::Zero(rhs.size()), 1.0, fixed, rhs);
    f0 = ScalarField(grid, std::move(solved));
    const Eigen::VectorXd res = lap(f0.values) + lap(m0.u.values);
    double worst = 0.0;
    for (Index k = 0; k < res.size(); ++k)
      if (!fixed[k])
        worst = std::max(worst, std::abs(res[k]));
    if (!(worst < 1e-8))
      throw Error("poisson-not-converged", "initial potential residual " + std::to_string(worst));
  }
  require_finite(f0, "initial potential");
  if (warnings && looks_unbounded(f0))
    warnings->push_back("f0-unbounded");
  return f0;
}

ScalarField step_heat(const ScalarField &f, const ConformalField &m, double dt, Scheme scheme, double cfl_fraction)
{
  const GridSpec &grid = f.grid;
  const LaplacianOperator lap(grid);
  const auto fixed = detail::fixed_rows(grid);
  const Eigen::ArrayXd w = (-m.u.values.array()).exp();
  if (scheme == Scheme::ExplicitCFL) {
    const double h = grid.spacing();
    const double bound = cfl_fraction * h * h / (4.0 * w.maxCoeff());
    if (dt > bound * (1.0 + 1e-12))
      throw Error("cfl-violated", "explicit heat step " + std::to_string(dt) + " above CFL bound " +
                                      std::to_string(bound));
    Eigen::VectorXd out = f.values;
    const Eigen::VectorXd lf = lap(f.values);
    for (Index k = 0; k < out.size(); ++k)
      if (!fixed[k])
        out[k] += dt * w[k] * lf[k];
    return ScalarField(grid, std::move(out));
  }
  // Increment form (diag(1/w) - dt L) d = dt L f_old, so constants stay exact.
  const Eigen::VectorXd d = w.inverse().matrix();
  Eigen::VectorXd rhs = dt * lap(f.values);
  for (Index k = 0; k < rhs.size(); ++k)
    if (fixed[k])
      rhs[k] = 0.0;
  ScalarField out(grid, f.values + detail::solve_shifted_laplacian(lap, d, dt, fixed, rhs));
  require_finite(out, "potential");
  return out;
}

double identity_residual(const ScalarField &f, const ConformalField &m)
{
  const Eigen::VectorXd lf = laplacian(f.grid, f.values);
  const ScalarField r = scalar_curvature(m);
  double worst = 0.0;
  for (Index k = 0; k < f.size(); ++k)
    if (!f.grid.on_boundary(k))
      worst = std::max(worst, std::abs(std::exp(-m.u.values[k]) * lf[k] - r.values[k]));
  return worst;
}

ScalarField monotone_quantity(const ScalarField &f, const ConformalField &m, double t)
{
  const ScalarField g2 = grad_sq_euclid(f);
  return ScalarField(f.grid, (t * (-m.u.values.array()).exp() * g2.values.array() + f.values.array().square()).matrix());
}

MonitorReport potential_monitors(const ScalarField &f, const ConformalField &m, double t)
{
  MonitorReport rep;
  rep.t = t;
  rep.sup_abs_f = sup_norm(f);
  const ScalarField g2 = grad_sq_euclid(f);
  const Eigen::ArrayXd g2g = (-m.u.values.array()).exp() * g2.values.array();
  rep.sup_gradf2_g = g2g.maxCoeff();
  rep.sup_F = (t * g2g + f.values.array().square()).maxCoeff();
  rep.identity_residual = identity_residual(f, m);
  return rep;
}

MaxPrincipleResult max_principle_check(const std::vector<double> &sup_abs_f, double h)
{
  MaxPrincipleResult res;
  if (sup_abs_f.empty())
    return res;
  const double bound = sup_abs_f.front() * (1.0 + 1e-6) + 10.0 * h * h;
  for (std::size_t k = 0; k < sup_abs_f.size(); ++k) {
    const double excess = sup_abs_f[k] - bound;
    if (!(excess <= 0.0)) {
      res.holds = false;
      if (!(excess <= res.worst_excess)) {
        res.worst_excess = excess;
        res.worst_index = static_cast<Index>(k);
      }
    }
  }
  return res;
}

} // namespace ricci2d
