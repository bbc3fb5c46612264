#pragma once

#include "ricci2d/grid.hpp"

#include <Eigen/Core>

#include <string_view>

namespace ricci2d {

/// Nodal values on a grid. Used for u, f, R, psi and F alike.
struct ScalarField
{
  GridSpec grid;
  Eigen::VectorXd values;

  ScalarField() = default;
  ScalarField(GridSpec g, Eigen::VectorXd v);

  static ScalarField constant(const GridSpec &grid, double value);

  /// Evaluates fn(x, y) at every node (radial nodes use (rho, 0)).
  template <typename Fn> static ScalarField sample(const GridSpec &grid, Fn &&fn)
  {
    Eigen::VectorXd v(grid.node_count());
    for (Index k = 0; k < v.size(); ++k) {
      const Eigen::Vector2d p = grid.position(k);
      v[k] = fn(p.x(), p.y());
    }
    return ScalarField(grid, std::move(v));
  }

  Index size() const { return values.size(); }
  double operator[](Index k) const { return values[k]; }
  double at_origin() const { return values[grid.origin()]; }
};

/// Throws Error("non-finite") naming `what` if any value is NaN or Inf.
void require_finite(const ScalarField &w, std::string_view what);

/// The conformal exponent u of the metric e^u g_E.
struct ConformalField
{
  ScalarField u;

  ConformalField() = default;
  explicit ConformalField(ScalarField exponent);

  /// Builds u = log v; v must be strictly positive.
  static ConformalField from_factor(const ScalarField &v);

  const GridSpec &grid() const { return u.grid; }
  Eigen::ArrayXd factor() const { return u.values.array().exp(); }
};

/// Value at an arbitrary point: cubic Lagrange in rho (even extension
/// through the axis) on radial grids, bilinear on Cartesian grids.
/// Throws Error("region-out-of-grid") outside the grid.
double interpolate(const ScalarField &w, double x, double y);

/// Piecewise-linear value at radius rho on a radial grid.
double interpolate_linear(const ScalarField &w, double rho);

} // namespace ricci2d
