#pragma once

#include <Eigen/Core>

namespace ricci2d::detail {

/// Thomas algorithm for lower/diag/upper bands; lower[0] and upper[n-1] unused.
/// Overwrites rhs with the solution.
inline void solve_tridiagonal(const Eigen::VectorXd &lower, Eigen::VectorXd diag, const Eigen::VectorXd &upper,
                              Eigen::VectorXd &rhs)
{
  const Eigen::Index n = diag.size();
  for (Eigen::Index i = 1; i < n; ++i) {
    const double m = lower[i] / diag[i - 1];
    diag[i] -= m * upper[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (Eigen::Index i = n - 2; i >= 0; --i)
    rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

} // namespace ricci2d::detail
