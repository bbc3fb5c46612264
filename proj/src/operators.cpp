#include "ricci2d/operators.hpp"
#include "ricci2d/error.hpp"

#include "ricci2d/detail/stencil.hpp"

#include <cmath>

namespace ricci2d {

Eigen::MatrixXd fd_weights(double x0, const Eigen::Ref<const Eigen::VectorXd> &nodes, int m)
{
  const Index n = nodes.size();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(m + 1, n);
  double c1 = 1.0;
  double c4 = nodes[0] - x0;
  c(0, 0) = 1.0;
  for (Index i = 1; i < n; ++i) {
    const int mn = static_cast<int>(std::min<Index>(i, m));
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - x0;
    for (Index j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c(k, i) = c1 * (k * c(k - 1, i - 1) - c5 * c(k, i - 1)) / c2;
        c(0, i) = -c1 * c5 * c(0, i - 1) / c2;
      }
      for (int k = mn; k >= 1; --k)
        c(k, j) = (c4 * c(k, j) - k * c(k - 1, j)) / c3;
      c(0, j) = c4 * c(0, j) / c3;
    }
    c1 = c2;
  }
  return c;
}

namespace detail {

namespace {

StencilRow make_row(double x0, Index self, const std::vector<Index> &idx, const std::vector<double> &pos)
{
  Eigen::VectorXd nodes(static_cast<Index>(pos.size()));
  for (std::size_t k = 0; k < pos.size(); ++k)
    nodes[static_cast<Index>(k)] = pos[k];
  const Eigen::MatrixXd w = fd_weights(x0, nodes, 2);
  StencilRow row;
  // Fold duplicated indices (mirror ghosts) and drop the centre node.
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (idx[k] == self)
      continue;
    int slot = -1;
    for (int s = 0; s < row.count; ++s)
      if (row.idx[s] == idx[k])
        slot = s;
    if (slot < 0) {
      slot = row.count++;
      row.idx[slot] = idx[k];
    }
    row.d1[slot] += w(1, static_cast<Index>(k));
    row.d2[slot] += w(2, static_cast<Index>(k));
  }
  return row;
}

} // namespace

std::vector<StencilRow> line_stencil(const std::vector<double> &x, BoundaryModel boundary, bool axis_at_lower_end)
{
  const Index n = static_cast<Index>(x.size());
  std::vector<StencilRow> rows(x.size());
  auto end_row = [&](Index i, Index inward, Index step) {
    if (boundary == BoundaryModel::Neumann0) {
      const double ghost = 2.0 * x[i] - x[inward];
      return make_row(x[i], i, {inward, i, inward}, {x[inward], x[i], ghost});
    }
    std::vector<Index> idx;
    std::vector<double> pos;
    for (Index k = 0; k < 4; ++k) {
      idx.push_back(i + k * step);
      pos.push_back(x[i + k * step]);
    }
    return make_row(x[i], i, idx, pos);
  };
  for (Index i = 1; i + 1 < n; ++i)
    rows[i] = make_row(x[i], i, {i - 1, i, i + 1}, {x[i - 1], x[i], x[i + 1]});
  if (axis_at_lower_end)
    rows[0] = make_row(x[0], 0, {1, 0, 1}, {-x[1], x[0], x[1]});
  else
    rows[0] = end_row(0, 1, 1);
  rows[n - 1] = end_row(n - 1, n - 2, -1);
  return rows;
}

std::vector<double> radial_nodes(const GridSpec &grid)
{
  std::vector<double> x(grid.n);
  for (Index i = 0; i < grid.n; ++i)
    x[i] = grid.radius(i);
  return x;
}

std::vector<double> axis_nodes(const GridSpec &grid)
{
  std::vector<double> x(grid.n);
  for (Index i = 0; i < grid.n; ++i)
    x[i] = grid.coord(i);
  return x;
}

std::vector<LaplacianRow> radial_laplacian_rows(const GridSpec &grid)
{
  const auto x = radial_nodes(grid);
  const auto rows = line_stencil(x, grid.boundary, true);
  std::vector<LaplacianRow> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto &r = rows[i];
    out[i].count = r.count;
    out[i].idx = r.idx;
    for (int k = 0; k < r.count; ++k)
      out[i].weight[k] = i == 0 ? 2.0 * r.d2[k] : r.d2[k] + r.d1[k] / x[i];
  }
  return out;
}

} // namespace detail

using detail::apply_d1;
using detail::apply_d2;

LaplacianOperator::LaplacianOperator(const GridSpec &grid) : grid_(grid)
{
  if (grid.radial())
    radial_rows_ = detail::radial_laplacian_rows(grid);
  else
    axis_rows_ = detail::line_stencil(detail::axis_nodes(grid), grid.boundary, false);
}

void LaplacianOperator::apply(const Eigen::Ref<const Eigen::VectorXd> &w, Eigen::Ref<Eigen::VectorXd> out) const
{
  if (grid_.radial()) {
    for (Index i = 0; i < grid_.n; ++i) {
      const auto &r = radial_rows_[i];
      double acc = 0.0;
      for (int k = 0; k < r.count; ++k)
        acc += r.weight[k] * (w[r.idx[k]] - w[i]);
      out[i] = acc;
    }
    return;
  }
  const Index n = grid_.n;
  for (Index iy = 0; iy < n; ++iy)
    for (Index ix = 0; ix < n; ++ix)
      out[iy * n + ix] = apply_d2(axis_rows_[ix], w, ix, 1, iy * n) + apply_d2(axis_rows_[iy], w, iy, n, ix);
}

Eigen::VectorXd LaplacianOperator::operator()(const Eigen::Ref<const Eigen::VectorXd> &w) const
{
  Eigen::VectorXd out(w.size());
  apply(w, out);
  return out;
}

Eigen::VectorXd laplacian(const GridSpec &grid, const Eigen::Ref<const Eigen::VectorXd> &w)
{
  return LaplacianOperator(grid)(w);
}

ScalarField laplacian(const ScalarField &w)
{
  return ScalarField(w.grid, laplacian(w.grid, w.values));
}

Gradient gradient(const ScalarField &w)
{
  const GridSpec &grid = w.grid;
  Gradient g{Eigen::VectorXd::Zero(w.size()), Eigen::VectorXd::Zero(w.size())};
  if (grid.radial()) {
    const auto rows = detail::line_stencil(detail::radial_nodes(grid), grid.boundary, true);
    for (Index i = 1; i < grid.n; ++i)
      g.dx[i] = apply_d1(rows[i], w.values, i);
    return g;
  }
  const auto rows = detail::line_stencil(detail::axis_nodes(grid), grid.boundary, false);
  const Index n = grid.n;
  for (Index iy = 0; iy < n; ++iy)
    for (Index ix = 0; ix < n; ++ix) {
      g.dx[iy * n + ix] = apply_d1(rows[ix], w.values, ix, 1, iy * n);
      g.dy[iy * n + ix] = apply_d1(rows[iy], w.values, iy, n, ix);
    }
  return g;
}

Hessian hessian(const ScalarField &w)
{
  const GridSpec &grid = w.grid;
  const Index size = w.size();
  Hessian h{Eigen::VectorXd::Zero(size), Eigen::VectorXd::Zero(size), Eigen::VectorXd::Zero(size)};
  if (grid.radial()) {
    const auto x = detail::radial_nodes(grid);
    const auto rows = detail::line_stencil(x, grid.boundary, true);
    h.xx[0] = apply_d2(rows[0], w.values, 0);
    h.yy[0] = h.xx[0];
    for (Index i = 1; i < grid.n; ++i) {
      h.xx[i] = apply_d2(rows[i], w.values, i);
      h.yy[i] = apply_d1(rows[i], w.values, i) / x[i];
    }
    return h;
  }
  const auto rows = detail::line_stencil(detail::axis_nodes(grid), grid.boundary, false);
  const Index n = grid.n;
  Eigen::VectorXd wx(size);
  for (Index iy = 0; iy < n; ++iy)
    for (Index ix = 0; ix < n; ++ix) {
      h.xx[iy * n + ix] = apply_d2(rows[ix], w.values, ix, 1, iy * n);
      h.yy[iy * n + ix] = apply_d2(rows[iy], w.values, iy, n, ix);
      wx[iy * n + ix] = apply_d1(rows[ix], w.values, ix, 1, iy * n);
    }
  for (Index iy = 0; iy < n; ++iy)
    for (Index ix = 0; ix < n; ++ix)
      h.xy[iy * n + ix] = apply_d1(rows[iy], wx, iy, n, ix);
  return h;
}

ScalarField grad_sq_euclid(const ScalarField &w)
{
  const Gradient g = gradient(w);
  return ScalarField(w.grid, g.dx.cwiseAbs2() + g.dy.cwiseAbs2());
}

double sup_norm(const ScalarField &w)
{
  return w.size() == 0 ? 0.0 : w.values.cwiseAbs().maxCoeff();
}

double sup_norm_interior(const ScalarField &w)
{
  double m = 0.0;
  for (Index k = 0; k < w.size(); ++k)
    if (!w.grid.on_boundary(k))
      m = std::max(m, std::abs(w.values[k]));
  return m;
}

} // namespace ricci2d
