#pragma once

#include "ricci2d/flow.hpp"
#include "ricci2d/potential.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace ricci2d {

enum class Family { Flat, GaussianBump, Cigar, Cone, FiniteArea };

std::string to_string(Family family);
Family parse_family(const std::string &text);

/// Analytic initial data. Flat: u = c. GaussianBump: u = A exp(-rho^2/sigma^2).
/// Cigar: u = -log(1 + rho^2). Cone: u = (beta - 1) log(eps^2 + rho^2).
/// FiniteArea: u = -p log(1 + rho^2).
struct InitialData
{
  Family family = Family::Flat;
  double c = 0.0;
  double amplitude = 1.0;
  double sigma = 2.0;
  double beta = 0.5;
  double epsilon = 0.1;
  double p = 2.0;

  void validate() const;
  double u0(double rho) const;
  /// Closed-form R0 = -e^{-u0} lap u0.
  double curvature(double rho) const;
};

struct DiagnosticsConfig
{
  GridKind kind = GridKind::Radial1D; ///< rescaled grid layout
  double extent = 4.0;                ///< A_max
  Index n = 257;
  double ck_radius = 2.0;
  double compact_fraction = 0.25;     ///< K = {|x| <= fraction * L}
  double fit_t_min = 1.0;
  bool aperture = true;               ///< per-record aperture on radial runs
  double aperture_extent = 1e4;
  Index aperture_n = 4001;
  double aperture_stretch = 1.003;

  GridSpec grid() const;
  GridSpec aperture_grid() const;
};

struct Expected
{
  Existence existence = Existence::Global;
  std::optional<double> aperture;
  bool has_exact = false;
};

struct Scenario
{
  std::string name;
  InitialData initial;
  GridSpec grid;
  SolverConfig solver;
  PotentialGauge gauge;
  DiagnosticsConfig diagnostics;
  Expected expected;

  void validate() const;
  ConformalField initial_metric() const;
  ConformalField initial_metric(const GridSpec &grid) const;
  /// Exact u at a point, or nullopt for families without a closed form.
  std::optional<double> exact(double x, double y, double t) const;
  /// Boundary data for BoundaryModel::Prescribed (empty without an exact solution).
  BoundaryData boundary_data() const;
};

/// Named scenario with default grid and solver. Parameters override the
/// family defaults (keys c, amplitude, sigma, beta, epsilon, p).
/// Throws Error("unknown-scenario") or Error("parameter-out-of-range").
Scenario build(const std::string &name, const std::map<std::string, double> &parameters = {});

/// Exact u(x, t); throws Error("no-exact-solution").
double exact_solution(const Scenario &s, double x, double y, double t);

/// Max relative error of the discrete initial curvature against its closed
/// form, measured over interior nodes.
double initial_curvature_error(const Scenario &s);

/// Reads an INI scenario file with sections [initial] [grid] [solver]
/// [gauge] [diagnostics]. Unknown sections or keys throw Error("unknown-key").
Scenario load_scenario(const std::filesystem::path &path);
Scenario parse_scenario(const std::string &text);

/// Canonical INI text of a scenario (round-trips through parse_scenario).
std::string scenario_to_ini(const Scenario &s);

} // namespace ricci2d
