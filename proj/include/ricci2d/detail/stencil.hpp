#pragma once

#include "ricci2d/grid.hpp"

#include <array>
#include <vector>

namespace ricci2d::detail {

/// Difference-form weights at one node of a 1D line: derivative
/// approximations are sum_k weight[k] * (w[idx[k]] - w[self]).
struct StencilRow
{
  int count = 0;
  std::array<Index, 4> idx{};
  std::array<double, 4> d1{};
  std::array<double, 4> d2{};
};

/// Rows for a 1D line of nodes. The lower end is either a boundary or the
/// radial axis (even extension); the upper end is always a boundary.
std::vector<StencilRow> line_stencil(const std::vector<double> &nodes, BoundaryModel boundary,
                                     bool axis_at_lower_end);

std::vector<double> radial_nodes(const GridSpec &grid);
std::vector<double> axis_nodes(const GridSpec &grid);

template <typename Values> double apply_d1(const StencilRow &row, const Values &w, Index self, Index stride = 1,
                                           Index base = 0)
{
  double acc = 0.0;
  const double centre = w[base + self * stride];
  for (int k = 0; k < row.count; ++k)
    acc += row.d1[k] * (w[base + row.idx[k] * stride] - centre);
  return acc;
}

template <typename Values> double apply_d2(const StencilRow &row, const Values &w, Index self, Index stride = 1,
                                           Index base = 0)
{
  double acc = 0.0;
  const double centre = w[base + self * stride];
  for (int k = 0; k < row.count; ++k)
    acc += row.d2[k] * (w[base + row.idx[k] * stride] - centre);
  return acc;
}

/// Radial Laplacian row: w'' + w'/rho, with 2 w''(0) on the axis.
struct LaplacianRow
{
  int count = 0;
  std::array<Index, 4> idx{};
  std::array<double, 4> weight{};
};

std::vector<LaplacianRow> radial_laplacian_rows(const GridSpec &grid);

} // namespace ricci2d::detail
