#pragma once

#include "ricci2d/field.hpp"

#include <utility>
#include <vector>

namespace ricci2d {

/// R = -e^{-u} lap(u), units 1/length^2.
ScalarField scalar_curvature(const ConformalField &m);

/// Integral of e^u over the Euclidean disk of the given radius.
/// Radial grids: 2 pi int e^u rho drho (trapezoid). Cartesian grids: polar
/// trapezoid rule over bilinear samples of e^u.
double conformal_area(const ConformalField &m, double region_radius);

/// r(rho) = int_0^rho e^{u/2} ds on a radial grid.
double geodesic_radius_radial(const ConformalField &m, double rho);

/// Geodesic radius at every node of a radial grid.
Eigen::VectorXd geodesic_radius_profile(const ConformalField &m);

/// Length of the coordinate circle |x| = rho: 2 pi rho e^{u(rho)/2}.
double circle_length_radial(const ConformalField &m, double rho);

/// First-arrival distance from `source` under e^u g_E, by first-order fast
/// marching on the eikonal equation |grad d| = e^{u/2}. Cartesian grids only.
ScalarField geodesic_distance_field(const ConformalField &m, Index source);

/// Conformally weighted length of the level set {d = level}: marching
/// squares on d, each segment weighted by e^{u/2} at its midpoint.
double level_set_length(const ScalarField &distance, const ConformalField &m, double level);

struct ApertureEstimate
{
  double value = 0.0;
  std::vector<std::pair<double, double>> samples; ///< (geodesic radius r, L / (2 pi r))
  bool extrapolated = false;                      ///< fit converged and trusted
  double residual = 0.0;                          ///< RMS of the 1/r fit
};

struct ApertureOptions
{
  int sample_count = 16;
  double residual_tolerance = 1e-2;
  double extrapolation_tolerance = 1e-2;
};

/// Aperture lim L(dB_r) / (2 pi r): ratios at geometrically spaced geodesic
/// radii in the outer half of the domain, extrapolated linearly in 1/r.
/// Throws Error("domain-too-small") when fewer than 5 radii fit.
ApertureEstimate aperture(const ConformalField &m, const ApertureOptions &options = {});

} // namespace ricci2d
