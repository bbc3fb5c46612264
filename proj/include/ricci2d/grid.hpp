#pragma once

#include <Eigen/Core>

#include <string>

namespace ricci2d {

using Index = Eigen::Index;

enum class GridKind { Radial1D, Cartesian2D };

/// How boundary nodes behave. DirichletInitial freezes them at their t = 0
/// values, Neumann0 mirrors the field across the boundary, Prescribed takes
/// time-dependent values from an exact solution supplied by the caller.
enum class BoundaryModel { DirichletInitial, Neumann0, Prescribed };

/// Node layout of a radial (index 0 at rho = 0) or Cartesian (row-major,
/// origin at the centre node) grid.
struct GridSpec
{
  GridKind kind = GridKind::Radial1D;
  double extent = 1.0; ///< radius (radial) or half-width (Cartesian)
  Index n = 16;        ///< points per axis
  BoundaryModel boundary = BoundaryModel::DirichletInitial;
  double stretch = 1.0; ///< geometric spacing ratio; radial only, 1 means uniform

  static GridSpec radial(double extent, Index n, BoundaryModel b = BoundaryModel::DirichletInitial);
  static GridSpec cartesian(double extent, Index n, BoundaryModel b = BoundaryModel::DirichletInitial);
  /// Radial grid whose spacing grows by `ratio` per node, starting at rho = 0.
  static GridSpec radial_stretched(double extent, Index n, double ratio);

  /// Throws Error("invalid-grid") when the invariants do not hold.
  void validate() const;

  bool radial() const { return kind == GridKind::Radial1D; }
  bool uniform() const { return stretch == 1.0; }
  Index node_count() const { return radial() ? n : n * n; }

  /// Uniform spacing, or the first (smallest) spacing of a stretched grid.
  double spacing() const;

  double radius(Index i) const;
  double coord(Index i) const { return static_cast<double>(2 * i - (n - 1)) * extent / static_cast<double>(n - 1); }
  Index index(Index ix, Index iy) const { return iy * n + ix; }
  Index origin() const { return radial() ? 0 : index(n / 2, n / 2); }

  /// Position of node k; radial nodes sit on the positive x axis.
  Eigen::Vector2d position(Index k) const;
  bool on_boundary(Index k) const;

  bool operator==(const GridSpec &) const = default;
};

std::string to_string(GridKind kind);
std::string to_string(BoundaryModel boundary);
GridKind parse_grid_kind(const std::string &text);
BoundaryModel parse_boundary(const std::string &text);

} // namespace ricci2d
