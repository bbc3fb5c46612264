#include "ricci2d/kahler.hpp"
#include "ricci2d/error.hpp"
#include "ricci2d/operators.hpp"

#include <cmath>
#include <limits>

namespace ricci2d {

PotentialFlowState make_potential_state(const ConformalField &u0, const ScalarField &f0, const ScalarField *psi0,
                                        double tolerance)
{
  const GridSpec &grid = u0.grid();
  if (f0.size() != u0.u.size())
    throw Error("invalid-field", "potential and metric live on different grids");
  const ScalarField sum(grid, u0.u.values + f0.values);
  const double compat = sup_norm_interior(laplacian(sum));
  if (!(compat < tolerance))
    throw Error("incompatible-potential", "lap(u0 + f0) = " + std::to_string(compat));
  PotentialFlowState p{psi0 ? *psi0 : ScalarField::constant(grid, 0.0), u0, f0};
  require_finite(p.psi, "psi");
  return p;
}

Eigen::VectorXd potential_rate(const PotentialFlowState &p, const Eigen::Ref<const Eigen::VectorXd> &u)
{
  return u - p.u0_ref.u.values - p.f0_ref.values;
}

void step_potential(PotentialFlowState &p, const ScalarField &u_start, double dt, const ScalarField *u_end)
{
  if (u_end)
    p.psi.values += (0.5 * dt) * (potential_rate(p, u_start.values) + potential_rate(p, u_end->values));
  else
    p.psi.values += dt * potential_rate(p, u_start.values);
}

double equivalence_defect(const ScalarField &psi, const ConformalField &u0, const ConformalField &m)
{
  const GridSpec &grid = psi.grid;
  const Eigen::VectorXd lp = laplacian(grid, psi.values);
  double worst = 0.0;
  for (Index k = 0; k < psi.size(); ++k) {
    if (grid.on_boundary(k))
      continue;
    const double s = std::exp(m.u.values[k]) - std::exp(u0.u.values[k]) - lp[k];
    worst = std::max(worst, std::abs(s));
  }
  return worst;
}

double equivalence_defect(const PotentialFlowState &p, const ConformalField &m)
{
  return equivalence_defect(p.psi, p.u0_ref, m);
}

Reconstruction reconstruct_metric(const PotentialFlowState &p, const ConformalField &m)
{
  const GridSpec &grid = p.psi.grid;
  const Eigen::VectorXd lp = laplacian(grid, p.psi.values);
  Reconstruction rec{ScalarField(grid, m.u.values), 0.0};
  for (Index k = 0; k < lp.size(); ++k) {
    if (grid.on_boundary(k))
      continue;
    const double v = std::exp(p.u0_ref.u.values[k]) + lp[k];
    if (!(v > 0.0)) {
      rec.sup_error = std::numeric_limits<double>::infinity();
      continue;
    }
    rec.u.values[k] = std::log(v);
    rec.sup_error = std::max(rec.sup_error, std::abs(rec.u.values[k] - m.u.values[k]));
  }
  return rec;
}

} // namespace ricci2d
