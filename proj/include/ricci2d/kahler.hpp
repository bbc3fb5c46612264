#pragma once

#include "ricci2d/field.hpp"

namespace ricci2d {

/// Real-coordinate potential flow: e^u = e^{u0} + lap psi with
/// psi_t = (u - u0) - f0.
struct PotentialFlowState
{
  ScalarField psi;
  ConformalField u0_ref;
  ScalarField f0_ref;
};

/// Builds the state with psi(0) = psi0 (zero when empty). Requires
/// ||lap(u0 + f0)|| < tolerance on interior nodes, otherwise throws
/// Error("incompatible-potential").
PotentialFlowState make_potential_state(const ConformalField &u0, const ScalarField &f0,
                                        const ScalarField *psi0 = nullptr, double tolerance = 1e-6);

/// psi += dt ((u - u0) - f0) evaluated at u_start, or the trapezoid average
/// when u_end is given.
void step_potential(PotentialFlowState &p, const ScalarField &u_start, double dt, const ScalarField *u_end = nullptr);

/// psi rate (u - u0) - f0 for the given u.
Eigen::VectorXd potential_rate(const PotentialFlowState &p, const Eigen::Ref<const Eigen::VectorXd> &u);

/// ||e^u - e^{u0} - lap psi|| over interior nodes.
double equivalence_defect(const ScalarField &psi, const ConformalField &u0, const ConformalField &m);
double equivalence_defect(const PotentialFlowState &p, const ConformalField &m);

/// u_rec = log(e^{u0} + lap psi) on interior nodes (boundary nodes keep u).
/// sup_error is +inf when e^{u0} + lap psi is not positive somewhere.
struct Reconstruction
{
  ScalarField u;
  double sup_error = 0.0; ///< max over interior nodes of |u_rec - u|
};
Reconstruction reconstruct_metric(const PotentialFlowState &p, const ConformalField &m);

} // namespace ricci2d
