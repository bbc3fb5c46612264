#include "ricci2d/grid.hpp"
#include "ricci2d/error.hpp"

#include <cmath>

namespace ricci2d {

GridSpec GridSpec::radial(double extent, Index n, BoundaryModel b)
{
  GridSpec g{GridKind::Radial1D, extent, n, b, 1.0};
  g.validate();
  return g;
}

GridSpec GridSpec::cartesian(double extent, Index n, BoundaryModel b)
{
  GridSpec g{GridKind::Cartesian2D, extent, n, b, 1.0};
  g.validate();
  return g;
}

GridSpec GridSpec::radial_stretched(double extent, Index n, double ratio)
{
  GridSpec g{GridKind::Radial1D, extent, n, BoundaryModel::DirichletInitial, ratio};
  g.validate();
  return g;
}

void GridSpec::validate() const
{
  if (n < 16)
    throw Error("invalid-grid", "need at least 16 points per axis, got " + std::to_string(n));
  if (!(extent > 0.0) || !std::isfinite(extent))
    throw Error("invalid-grid", "extent must be positive and finite");
  if (!(stretch >= 1.0) || !std::isfinite(stretch))
    throw Error("invalid-grid", "stretch ratio must be >= 1");
  if (kind == GridKind::Cartesian2D) {
    if (n % 2 == 0)
      throw Error("invalid-grid", "Cartesian grids need an odd point count so the origin is a node");
    if (stretch != 1.0)
      throw Error("invalid-grid", "only radial grids may be stretched");
  }
}

double GridSpec::spacing() const
{
  if (kind == GridKind::Cartesian2D)
    return 2.0 * extent / static_cast<double>(n - 1);
  if (stretch == 1.0)
    return extent / static_cast<double>(n - 1);
  return extent * (stretch - 1.0) / (std::pow(stretch, static_cast<double>(n - 1)) - 1.0);
}

double GridSpec::radius(Index i) const
{
  if (i == n - 1)
    return extent;
  if (stretch == 1.0)
    return static_cast<double>(i) * extent / static_cast<double>(n - 1);
  return spacing() * (std::pow(stretch, static_cast<double>(i)) - 1.0) / (stretch - 1.0);
}

Eigen::Vector2d GridSpec::position(Index k) const
{
  if (radial())
    return {radius(k), 0.0};
  return {coord(k % n), coord(k / n)};
}

bool GridSpec::on_boundary(Index k) const
{
  if (radial())
    return k == n - 1;
  const Index ix = k % n, iy = k / n;
  return ix == 0 || iy == 0 || ix == n - 1 || iy == n - 1;
}

std::string to_string(GridKind kind)
{
  return kind == GridKind::Radial1D ? "radial" : "cartesian";
}

std::string to_string(BoundaryModel boundary)
{
  switch (boundary) {
  case BoundaryModel::DirichletInitial: return "dirichlet_initial";
  case BoundaryModel::Neumann0: return "neumann0";
  case BoundaryModel::Prescribed: return "exact";
  }
  return "dirichlet_initial";
}

GridKind parse_grid_kind(const std::string &text)
{
  if (text == "radial")
    return GridKind::Radial1D;
  if (text == "cartesian")
    return GridKind::Cartesian2D;
  throw Error("parameter-out-of-range", "unknown grid kind '" + text + "'");
}

BoundaryModel parse_boundary(const std::string &text)
{
  if (text == "dirichlet_initial")
    return BoundaryModel::DirichletInitial;
  if (text == "neumann0")
    return BoundaryModel::Neumann0;
  if (text == "exact")
    return BoundaryModel::Prescribed;
  throw Error("parameter-out-of-range", "unknown boundary model '" + text + "'");
}

} // namespace ricci2d
