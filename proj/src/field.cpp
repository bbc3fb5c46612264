#include "ricci2d/field.hpp"
#include "ricci2d/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace ricci2d {

ScalarField::ScalarField(GridSpec g, Eigen::VectorXd v) : grid(g), values(std::move(v))
{
  if (values.size() != grid.node_count())
    throw Error("invalid-field", "value count " + std::to_string(values.size()) + " does not match grid node count " +
                                     std::to_string(grid.node_count()));
}

ScalarField ScalarField::constant(const GridSpec &grid, double value)
{
  return ScalarField(grid, Eigen::VectorXd::Constant(grid.node_count(), value));
}

void require_finite(const ScalarField &w, std::string_view what)
{
  if (!w.values.allFinite())
    throw Error("non-finite", std::string(what) + " contains NaN or Inf");
}

ConformalField::ConformalField(ScalarField exponent) : u(std::move(exponent))
{
  require_finite(u, "conformal exponent");
}

ConformalField ConformalField::from_factor(const ScalarField &v)
{
  if (!(v.values.array() > 0.0).all())
    throw Error("non-positive-factor", "conformal factor e^u must be strictly positive");
  return ConformalField(ScalarField(v.grid, v.values.array().log().matrix()));
}

namespace {

constexpr double kEdgeSlack = 1e-12;

// Index i with rho_i <= rho < rho_{i+1}, clamped to [0, n-2].
Index radial_cell(const GridSpec &grid, double rho)
{
  double s;
  if (grid.uniform())
    s = rho / grid.spacing();
  else
    s = std::log1p(rho * (grid.stretch - 1.0) / grid.spacing()) / std::log(grid.stretch);
  Index i = static_cast<Index>(std::floor(s));
  i = std::clamp<Index>(i, 0, grid.n - 2);
  // Guard the floor against rounding in the stretched mapping.
  while (i > 0 && grid.radius(i) > rho)
    --i;
  while (i < grid.n - 2 && grid.radius(i + 1) <= rho)
    ++i;
  return i;
}

double radial_cubic(const ScalarField &w, double rho)
{
  const GridSpec &grid = w.grid;
  const Index i = radial_cell(grid, rho);
  Index first = std::min<Index>(i - 1, grid.n - 4);
  std::array<double, 4> x{}, y{};
  for (int k = 0; k < 4; ++k) {
    const Index j = first + k;
    if (j < 0) {
      x[k] = -grid.radius(-j);
      y[k] = w.values[-j];
    } else {
      x[k] = grid.radius(j);
      y[k] = w.values[j];
    }
  }
  double acc = 0.0;
  for (int a = 0; a < 4; ++a) {
    double l = 1.0;
    for (int b = 0; b < 4; ++b)
      if (b != a)
        l *= (rho - x[b]) / (x[a] - x[b]);
    acc += l * y[a];
  }
  return acc;
}

} // namespace

double interpolate(const ScalarField &w, double x, double y)
{
  const GridSpec &grid = w.grid;
  const double L = grid.extent;
  if (grid.radial()) {
    const double rho = std::hypot(x, y);
    if (rho > L * (1.0 + kEdgeSlack))
      throw Error("region-out-of-grid", "point at radius " + std::to_string(rho) + " beyond grid extent");
    return radial_cubic(w, std::min(rho, L));
  }
  if (std::abs(x) > L * (1.0 + kEdgeSlack) || std::abs(y) > L * (1.0 + kEdgeSlack))
    throw Error("region-out-of-grid", "point outside the Cartesian grid");
  const double h = grid.spacing();
  const double sx = std::clamp((x + L) / h, 0.0, static_cast<double>(grid.n - 1));
  const double sy = std::clamp((y + L) / h, 0.0, static_cast<double>(grid.n - 1));
  const Index ix = std::min<Index>(static_cast<Index>(sx), grid.n - 2);
  const Index iy = std::min<Index>(static_cast<Index>(sy), grid.n - 2);
  const double fx = sx - static_cast<double>(ix), fy = sy - static_cast<double>(iy);
  const auto at = [&](Index i, Index j) { return w.values[grid.index(i, j)]; };
  return (1 - fx) * (1 - fy) * at(ix, iy) + fx * (1 - fy) * at(ix + 1, iy) + (1 - fx) * fy * at(ix, iy + 1) +
         fx * fy * at(ix + 1, iy + 1);
}

double interpolate_linear(const ScalarField &w, double rho)
{
  const GridSpec &grid = w.grid;
  if (!grid.radial())
    throw Error("invalid-grid", "linear radial interpolation needs a radial grid");
  if (rho < 0.0 || rho > grid.extent * (1.0 + kEdgeSlack))
    throw Error("region-out-of-grid", "radius " + std::to_string(rho) + " outside [0, extent]");
  rho = std::min(rho, grid.extent);
  const Index i = radial_cell(grid, rho);
  const double a = grid.radius(i), b = grid.radius(i + 1);
  const double s = (rho - a) / (b - a);
  return (1.0 - s) * w.values[i] + s * w.values[i + 1];
}

} // namespace ricci2d
