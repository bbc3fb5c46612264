#include "ricci2d/scenarios.hpp"
#include "ricci2d/error.hpp"
#include "ricci2d/geometry.hpp"
#include "ricci2d/snapshot.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace ricci2d {

std::string to_string(Family family)
{
  switch (family) {
  case Family::Flat: return "flat";
  case Family::GaussianBump: return "bump";
  case Family::Cigar: return "cigar";
  case Family::Cone: return "cone";
  case Family::FiniteArea: return "finite_area";
  }
  return "flat";
}

Family parse_family(const std::string &text)
{
  for (Family f : {Family::Flat, Family::GaussianBump, Family::Cigar, Family::Cone, Family::FiniteArea})
    if (to_string(f) == text)
      return f;
  throw Error("unknown-scenario", "unknown scenario '" + text + "'");
}

void InitialData::validate() const
{
  const bool finite = std::isfinite(c) && std::isfinite(amplitude) && std::isfinite(sigma) && std::isfinite(beta) &&
                      std::isfinite(epsilon) && std::isfinite(p);
  if (!finite)
    throw Error("parameter-out-of-range", "initial data parameters must be finite");
  if (family == Family::GaussianBump && !(sigma > 0.0))
    throw Error("parameter-out-of-range", "bump width sigma must be positive");
  if (family == Family::Cone && !(beta > 0.0 && beta <= 1.0))
    throw Error("parameter-out-of-range", "cone angle beta must lie in (0, 1]");
  if (family == Family::Cone && !(epsilon > 0.0))
    throw Error("parameter-out-of-range", "cone smoothing epsilon must be positive");
  if (family == Family::FiniteArea && !(p > 0.0))
    throw Error("parameter-out-of-range", "finite-area exponent p must be positive");
}

double InitialData::u0(double rho) const
{
  const double r2 = rho * rho;
  switch (family) {
  case Family::Flat: return c;
  case Family::GaussianBump: return amplitude * std::exp(-r2 / (sigma * sigma));
  case Family::Cigar: return -std::log1p(r2);
  case Family::Cone: return (beta - 1.0) * std::log(epsilon * epsilon + r2);
  case Family::FiniteArea: return -p * std::log1p(r2);
  }
  return 0.0;
}

double InitialData::curvature(double rho) const
{
  const double r2 = rho * rho;
  switch (family) {
  case Family::Flat: return 0.0;
  case Family::GaussianBump: {
    const double s2 = sigma * sigma;
    const double u = amplitude * std::exp(-r2 / s2);
    const double lap = u * (4.0 * r2 / (s2 * s2) - 4.0 / s2);
    return -std::exp(-u) * lap;
  }
  case Family::Cigar: return 4.0 / (1.0 + r2);
  case Family::Cone: {
    const double e2 = epsilon * epsilon;
    return 4.0 * (1.0 - beta) * e2 * std::pow(e2 + r2, -1.0 - beta);
  }
  case Family::FiniteArea: return 4.0 * p * std::pow(1.0 + r2, p - 2.0);
  }
  return 0.0;
}

GridSpec DiagnosticsConfig::grid() const
{
  return kind == GridKind::Radial1D ? GridSpec::radial(extent, n) : GridSpec::cartesian(extent, n);
}

GridSpec DiagnosticsConfig::aperture_grid() const
{
  return GridSpec::radial_stretched(aperture_extent, aperture_n, aperture_stretch);
}

namespace {

bool cigar_like(const InitialData &d)
{
  return d.family == Family::Cigar || (d.family == Family::FiniteArea && d.p == 1.0);
}

Expected expected_for(const InitialData &d)
{
  Expected e;
  switch (d.family) {
  case Family::Flat: e.aperture = 1.0; e.has_exact = true; break;
  case Family::GaussianBump: e.aperture = 1.0; break;
  case Family::Cigar: e.aperture = 0.0; e.has_exact = true; break;
  case Family::Cone: e.aperture = d.beta; break;
  case Family::FiniteArea:
    if (d.p > 1.0)
      e.existence = Existence::FiniteTime;
    else
      e.aperture = 1.0 - d.p;
    e.has_exact = d.p == 1.0;
    break;
  }
  return e;
}

} // namespace

void Scenario::validate() const
{
  initial.validate();
  grid.validate();
  solver.validate();
  if (!grid.uniform())
    throw Error("invalid-grid", "flow grids must be uniform");
  if (grid.boundary == BoundaryModel::Prescribed && !expected.has_exact)
    throw Error("parameter-out-of-range", "boundary 'exact' needs a scenario with an exact solution");
  diagnostics.grid().validate();
  if (!(diagnostics.ck_radius > 0.0 && diagnostics.ck_radius <= diagnostics.extent))
    throw Error("parameter-out-of-range", "ck_radius must lie in (0, A_max]");
  if (!(diagnostics.compact_fraction > 0.0 && diagnostics.compact_fraction <= 1.0))
    throw Error("parameter-out-of-range", "compact_fraction must lie in (0, 1]");
  if (!(diagnostics.aperture_stretch >= 1.0) || diagnostics.aperture_n < 16 || !(diagnostics.aperture_extent > 0.0))
    throw Error("parameter-out-of-range", "invalid aperture grid");
  if (!(diagnostics.fit_t_min >= 0.0))
    throw Error("parameter-out-of-range", "fit_t_min must be non-negative");
}

ConformalField Scenario::initial_metric() const
{
  return initial_metric(grid);
}

ConformalField Scenario::initial_metric(const GridSpec &g) const
{
  return ConformalField(ScalarField::sample(g, [this](double x, double y) { return initial.u0(std::hypot(x, y)); }));
}

std::optional<double> Scenario::exact(double x, double y, double t) const
{
  if (initial.family == Family::Flat)
    return initial.c;
  if (cigar_like(initial))
    return -std::log(std::exp(4.0 * t) + x * x + y * y);
  return std::nullopt;
}

BoundaryData Scenario::boundary_data() const
{
  if (!expected.has_exact)
    return {};
  const Scenario copy = *this;
  return [copy](double x, double y, double t) { return *copy.exact(x, y, t); };
}

double exact_solution(const Scenario &s, double x, double y, double t)
{
  const auto u = s.exact(x, y, t);
  if (!u)
    throw Error("no-exact-solution", "scenario '" + s.name + "' has no exact solution");
  return *u;
}

Scenario build(const std::string &name, const std::map<std::string, double> &parameters)
{
  Scenario s;
  s.initial.family = parse_family(name);
  s.name = name;
  for (const auto &[key, value] : parameters) {
    if (key == "c")
      s.initial.c = value;
    else if (key == "amplitude" || key == "A")
      s.initial.amplitude = value;
    else if (key == "sigma")
      s.initial.sigma = value;
    else if (key == "beta")
      s.initial.beta = value;
    else if (key == "epsilon")
      s.initial.epsilon = value;
    else if (key == "p")
      s.initial.p = value;
    else
      throw Error("parameter-out-of-range", "unknown parameter '" + key + "' for scenario '" + name + "'");
  }
  s.initial.validate();

  switch (s.initial.family) {
  case Family::Flat:
    s.grid = GridSpec::radial(16.0, 257);
    s.solver.t_end = 100.0;
    break;
  case Family::GaussianBump:
    s.grid = GridSpec::radial(64.0, 4096);
    s.solver.t_end = 1000.0;
    break;
  case Family::Cigar:
    s.grid = GridSpec::radial(40.0, 801, BoundaryModel::Prescribed);
    s.solver.t_end = 1.0;
    break;
  case Family::Cone:
    s.grid = GridSpec::radial(64.0, 1025);
    s.solver.t_end = 100.0;
    break;
  case Family::FiniteArea:
    s.grid = GridSpec::radial(64.0, 1025);
    s.solver.t_end = 1.0;
    break;
  }
  s.expected = expected_for(s.initial);
  s.validate();
  return s;
}

double initial_curvature_error(const Scenario &s)
{
  const ConformalField m = s.initial_metric();
  const ScalarField R = scalar_curvature(m);
  double scale = 0.0, err = 0.0;
  for (Index k = 0; k < R.size(); ++k) {
    if (s.grid.on_boundary(k))
      continue;
    const double exact = s.initial.curvature(s.grid.position(k).norm());
    scale = std::max(scale, std::abs(exact));
    err = std::max(err, std::abs(R[k] - exact));
  }
  return scale > 0.0 ? err / scale : err;
}

// ---------------------------------------------------------------------------
// INI files

namespace {

using boost::property_tree::ptree;

const std::map<std::string, std::set<std::string>> &known_keys()
{
  static const std::map<std::string, std::set<std::string>> keys = {
      {"initial", {"family", "name", "c", "amplitude", "sigma", "beta", "epsilon", "p"}},
      {"grid", {"kind", "extent", "n", "boundary"}},
      {"solver",
       {"scheme", "dt_max", "cfl_fraction", "newton_tol", "newton_max_iter", "t_end", "monitor_stride", "dt_min",
        "dt_relative"}},
      {"gauge", {"kind", "harmonic_offset"}},
      {"diagnostics",
       {"kind", "extent", "n", "ck_radius", "compact_fraction", "fit_t_min", "aperture", "aperture_extent",
        "aperture_n", "aperture_stretch"}},
  };
  return keys;
}

template <typename T> T get(const ptree &section, const std::string &where, const std::string &key, T fallback)
{
  const auto node = section.get_child_optional(key);
  if (!node)
    return fallback;
  const std::string text = node->data();
  std::istringstream in(text);
  T value{};
  in >> value;
  if (in.fail() || !(in >> std::ws).eof())
    throw Error("parameter-out-of-range", "[" + where + "] " + key + " = '" + text + "' is not a valid value");
  return value;
}

bool get_bool(const ptree &section, const std::string &key, bool fallback)
{
  const auto node = section.get_child_optional(key);
  if (!node)
    return fallback;
  const std::string &t = node->data();
  if (t == "true" || t == "1" || t == "yes" || t == "on")
    return true;
  if (t == "false" || t == "0" || t == "no" || t == "off")
    return false;
  throw Error("parameter-out-of-range", "[diagnostics] " + key + " = '" + t + "' is not a boolean");
}

std::string get_text(const ptree &section, const std::string &key, const std::string &fallback)
{
  const auto node = section.get_child_optional(key);
  return node ? node->data() : fallback;
}

} // namespace

Scenario parse_scenario(const std::string &text)
{
  ptree tree;
  try {
    std::istringstream in(text);
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error &e) {
    throw Error("bad-config", e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  for (const auto &[section, body] : tree) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end())
      throw Error("unknown-key", body.empty() ? "key '" + section + "' outside a section"
                                              : "unknown section [" + section + "]");
    for (const auto &[key, value] : body)
      if (!it->second.count(key))
        throw Error("unknown-key", "unknown key '" + key + "' in [" + section + "]");
  }
  const ptree empty;
  auto section = [&](const std::string &name) -> const ptree & {
    const auto child = tree.get_child_optional(name);
    return child ? *child : empty;
  };

  const ptree &ini = section("initial");
  const auto family = ini.get_child_optional("family");
  if (!family)
    throw Error("bad-config", "[initial] family is required");
  Scenario s = build(family->data());
  InitialData &d = s.initial;
  s.name = get_text(ini, "name", s.name);
  d.c = get<double>(ini, "initial", "c", d.c);
  d.amplitude = get<double>(ini, "initial", "amplitude", d.amplitude);
  d.sigma = get<double>(ini, "initial", "sigma", d.sigma);
  d.beta = get<double>(ini, "initial", "beta", d.beta);
  d.epsilon = get<double>(ini, "initial", "epsilon", d.epsilon);
  d.p = get<double>(ini, "initial", "p", d.p);
  d.validate();
  s.expected = expected_for(d);

  const ptree &grid = section("grid");
  s.grid.kind = parse_grid_kind(get_text(grid, "kind", to_string(s.grid.kind)));
  s.grid.extent = get<double>(grid, "grid", "extent", s.grid.extent);
  s.grid.n = get<Index>(grid, "grid", "n", s.grid.n);
  s.grid.boundary = parse_boundary(get_text(grid, "boundary", to_string(s.grid.boundary)));
  if (!grid.get_child_optional("boundary") && s.grid.boundary == BoundaryModel::Prescribed && !s.expected.has_exact)
    s.grid.boundary = BoundaryModel::DirichletInitial;

  const ptree &solver = section("solver");
  SolverConfig &c = s.solver;
  c.scheme = parse_scheme(get_text(solver, "scheme", to_string(c.scheme)));
  c.dt_max = get<double>(solver, "solver", "dt_max", c.dt_max);
  c.cfl_fraction = get<double>(solver, "solver", "cfl_fraction", c.cfl_fraction);
  c.newton_tol = get<double>(solver, "solver", "newton_tol", c.newton_tol);
  c.newton_max_iter = get<int>(solver, "solver", "newton_max_iter", c.newton_max_iter);
  c.t_end = get<double>(solver, "solver", "t_end", c.t_end);
  c.monitor_stride = get<int>(solver, "solver", "monitor_stride", c.monitor_stride);
  c.dt_min = get<double>(solver, "solver", "dt_min", c.dt_min);
  c.dt_relative = get<double>(solver, "solver", "dt_relative", c.dt_relative);

  const ptree &gauge = section("gauge");
  s.gauge.kind = parse_gauge(get_text(gauge, "kind", to_string(s.gauge.kind)));
  s.gauge.harmonic_offset = get<double>(gauge, "gauge", "harmonic_offset", s.gauge.harmonic_offset);

  const ptree &diag = section("diagnostics");
  DiagnosticsConfig &g = s.diagnostics;
  g.kind = parse_grid_kind(get_text(diag, "kind", to_string(g.kind)));
  g.extent = get<double>(diag, "diagnostics", "extent", g.extent);
  g.n = get<Index>(diag, "diagnostics", "n", g.n);
  g.ck_radius = get<double>(diag, "diagnostics", "ck_radius", g.ck_radius);
  g.compact_fraction = get<double>(diag, "diagnostics", "compact_fraction", g.compact_fraction);
  g.fit_t_min = get<double>(diag, "diagnostics", "fit_t_min", g.fit_t_min);
  g.aperture = get_bool(diag, "aperture", g.aperture);
  g.aperture_extent = get<double>(diag, "diagnostics", "aperture_extent", g.aperture_extent);
  g.aperture_n = get<Index>(diag, "diagnostics", "aperture_n", g.aperture_n);
  g.aperture_stretch = get<double>(diag, "diagnostics", "aperture_stretch", g.aperture_stretch);

  s.validate();
  return s;
}

Scenario load_scenario(const std::filesystem::path &path)
{
  std::ifstream in(path);
  if (!in)
    throw Error("io", "cannot read config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str());
}

std::string scenario_to_ini(const Scenario &s)
{
  const auto &d = s.initial;
  const auto &c = s.solver;
  const auto &g = s.diagnostics;
  std::ostringstream o;
  o << "[initial]\nfamily = " << to_string(d.family) << "\nname = " << s.name << "\nc = " << format_real(d.c)
    << "\namplitude = " << format_real(d.amplitude) << "\nsigma = " << format_real(d.sigma)
    << "\nbeta = " << format_real(d.beta) << "\nepsilon = " << format_real(d.epsilon) << "\np = " << format_real(d.p)
    << "\n\n[grid]\nkind = " << to_string(s.grid.kind) << "\nextent = " << format_real(s.grid.extent)
    << "\nn = " << s.grid.n << "\nboundary = " << to_string(s.grid.boundary)
    << "\n\n[solver]\nscheme = " << to_string(c.scheme) << "\ndt_max = " << format_real(c.dt_max)
    << "\ncfl_fraction = " << format_real(c.cfl_fraction) << "\nnewton_tol = " << format_real(c.newton_tol)
    << "\nnewton_max_iter = " << c.newton_max_iter << "\nt_end = " << format_real(c.t_end)
    << "\nmonitor_stride = " << c.monitor_stride << "\ndt_min = " << format_real(c.dt_min)
    << "\ndt_relative = " << format_real(c.dt_relative) << "\n\n[gauge]\nkind = " << to_string(s.gauge.kind)
    << "\nharmonic_offset = " << format_real(s.gauge.harmonic_offset) << "\n\n[diagnostics]\nkind = "
    << to_string(g.kind) << "\nextent = " << format_real(g.extent) << "\nn = " << g.n
    << "\nck_radius = " << format_real(g.ck_radius) << "\ncompact_fraction = " << format_real(g.compact_fraction)
    << "\nfit_t_min = " << format_real(g.fit_t_min) << "\naperture = " << (g.aperture ? "true" : "false")
    << "\naperture_extent = " << format_real(g.aperture_extent) << "\naperture_n = " << g.aperture_n
    << "\naperture_stretch = " << format_real(g.aperture_stretch) << "\n";
  return o.str();
}

} // namespace ricci2d
