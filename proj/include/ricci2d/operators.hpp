#pragma once

#include "ricci2d/detail/stencil.hpp"
#include "ricci2d/field.hpp"

#include <vector>

namespace ricci2d {

// Discrete flat-metric operators. Every stencil is written in difference
// form sum_j c_j (w_j - w_i), so constants map to exactly zero.

/// Flat Laplacian with its stencil rows precomputed for one grid: a 5-point
/// stencil on Cartesian grids, w'' + w'/rho on radial grids with 2 w''(0) on
/// the axis. Boundary rows follow the grid's boundary model (mirror ghost for
/// Neumann0, one-sided second order otherwise).
class LaplacianOperator
{
public:
  explicit LaplacianOperator(const GridSpec &grid);

  const GridSpec &grid() const { return grid_; }

  void apply(const Eigen::Ref<const Eigen::VectorXd> &w, Eigen::Ref<Eigen::VectorXd> out) const;
  Eigen::VectorXd operator()(const Eigen::Ref<const Eigen::VectorXd> &w) const;

  /// Visits (j, c_j) of row k, where lap_k = sum_j c_j (w_j - w_k).
  template <typename Fn> void for_each_neighbour(Index k, Fn &&fn) const
  {
    if (grid_.radial()) {
      const auto &r = radial_rows_[k];
      for (int s = 0; s < r.count; ++s)
        fn(r.idx[s], r.weight[s]);
      return;
    }
    const Index n = grid_.n, ix = k % n, iy = k / n;
    const auto &rx = axis_rows_[ix];
    for (int s = 0; s < rx.count; ++s)
      fn(iy * n + rx.idx[s], rx.d2[s]);
    const auto &ry = axis_rows_[iy];
    for (int s = 0; s < ry.count; ++s)
      fn(ry.idx[s] * n + ix, ry.d2[s]);
  }

private:
  GridSpec grid_;
  std::vector<detail::LaplacianRow> radial_rows_;
  std::vector<detail::StencilRow> axis_rows_;
};

Eigen::VectorXd laplacian(const GridSpec &grid, const Eigen::Ref<const Eigen::VectorXd> &w);
ScalarField laplacian(const ScalarField &w);

/// |grad w|^2 in the flat metric; one-sided second-order at the boundary.
ScalarField grad_sq_euclid(const ScalarField &w);

double sup_norm(const ScalarField &w);

/// Max |w| over nodes not on the grid boundary.
double sup_norm_interior(const ScalarField &w);

/// Cartesian gradient components; on radial grids dx is d/drho and dy = 0.
struct Gradient
{
  Eigen::VectorXd dx, dy;
};
Gradient gradient(const ScalarField &w);

/// Euclidean Hessian components. On radial grids (point (rho, 0)) these are
/// xx = w'', yy = w'/rho (-> w''(0) on the axis), xy = 0.
struct Hessian
{
  Eigen::VectorXd xx, xy, yy;
};
Hessian hessian(const ScalarField &w);

/// Finite-difference weights for the m-th derivative at x0 from the given
/// nodes (Fornberg's recursion). Returns weights for orders 0..m, row = order.
Eigen::MatrixXd fd_weights(double x0, const Eigen::Ref<const Eigen::VectorXd> &nodes, int m);

} // namespace ricci2d
