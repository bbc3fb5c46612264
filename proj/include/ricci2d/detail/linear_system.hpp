#pragma once

#include "ricci2d/operators.hpp"

namespace ricci2d::detail {

/// Solves (diag(d) - dt L) x = rhs on active rows; fixed rows are identity.
/// Radial grids use the tridiagonal solver, Cartesian grids Eigen's SparseLU.
Eigen::VectorXd solve_shifted_laplacian(const LaplacianOperator &lap, const Eigen::VectorXd &d, double dt,
                                        const std::vector<char> &fixed, const Eigen::VectorXd &rhs);

/// Rows held fixed by the boundary model (all boundary nodes unless Neumann0).
std::vector<char> fixed_rows(const GridSpec &grid);

} // namespace ricci2d::detail
