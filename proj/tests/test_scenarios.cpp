#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ricci2d/error.hpp"
#include "ricci2d/scenarios.hpp"

#include <cmath>
#include <functional>

using namespace ricci2d;

namespace {

std::string code_of(const std::function<void()> &fn)
{
  try {
    fn();
  } catch (const Error &e) {
    return e.code();
  }
  return "";
}

} // namespace

TEST_CASE("named scenarios")
{
  for (const char *name : {"flat", "bump", "cigar", "cone", "finite_area"}) {
    const Scenario s = build(name);
    CHECK(s.name == name);
    CHECK_NOTHROW(s.validate());
    CHECK(s.grid.radial());
  }
  CHECK(build("flat").expected.has_exact);
  CHECK(build("cigar").expected.aperture == 0.0);
  CHECK(build("cone").expected.aperture == 0.5);
  CHECK(build("cone", {{"beta", 0.75}}).expected.aperture == 0.75);
  CHECK(build("finite_area").expected.existence == Existence::FiniteTime);
  CHECK(build("finite_area", {{"p", 0.5}}).expected.aperture == doctest::Approx(0.5));
  CHECK(build("cigar").grid.boundary == BoundaryModel::Prescribed);

  CHECK(code_of([] { build("torus"); }) == "unknown-scenario");
  CHECK(code_of([] { build("bump", {{"sigma", -1.0}}); }) == "parameter-out-of-range");
  CHECK(code_of([] { build("cone", {{"beta", 1.5}}); }) == "parameter-out-of-range");
  CHECK(code_of([] { build("bump", {{"gamma", 0.3}}); }) == "parameter-out-of-range");
}

TEST_CASE("exact solutions")
{
  const Scenario cigar = build("cigar");
  CHECK(exact_solution(cigar, 1.0, 2.0, 0.25) == doctest::Approx(-std::log(std::exp(1.0) + 5.0)));
  CHECK(exact_solution(build("flat", {{"c", 0.7}}), 3.0, 1.0, 50.0) == 0.7);
  CHECK(code_of([] { exact_solution(build("bump"), 0, 0, 1); }) == "no-exact-solution");
  CHECK(code_of([] { exact_solution(build("cone"), 0, 0, 1); }) == "no-exact-solution");
  // the exact cigar restricted to t = 0 is the initial data
  for (double r : {0.0, 0.5, 3.0})
    CHECK(exact_solution(cigar, r, 0.0, 0.0) == doctest::Approx(cigar.initial.u0(r)));
}

TEST_CASE("closed-form initial curvature")
{
  // second-order Laplacian: halving h quarters the error
  for (const char *name : {"bump", "cigar", "cone"}) {
    Scenario s = build(name);
    s.grid.extent = 8.0;
    s.grid.boundary = BoundaryModel::DirichletInitial;
    // the cone's smoothing scale is 0.1, so it needs a finer grid
    const Index n = std::string(name) == "cone" ? 1025 : 257;
    s.grid.n = n;
    const double e1 = initial_curvature_error(s);
    s.grid.n = 2 * n - 1;
    const double e2 = initial_curvature_error(s);
    INFO(std::string(name));
    CHECK(e1 < 0.05);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.15));
  }
  InitialData sphere;
  sphere.family = Family::FiniteArea;
  sphere.p = 2.0;
  // u = -2 log(1 + rho^2) is a round sphere, R = 8
  for (double r : {0.0, 0.3, 2.0, 9.0})
    CHECK(sphere.curvature(r) == doctest::Approx(8.0));
}

TEST_CASE("INI configuration")
{
  const Scenario s = parse_scenario("[initial]\nfamily = cone\nbeta = 0.25\n"
                                    "[grid]\nextent = 32\nn = 513\n"
                                    "[solver]\nscheme = explicit\nt_end = 3\ncfl_fraction = 0.4\n"
                                    "[gauge]\nkind = poisson\n"
                                    "[diagnostics]\nextent = 2\naperture = false\n");
  CHECK(s.initial.family == Family::Cone);
  CHECK(s.initial.beta == 0.25);
  CHECK(s.expected.aperture == 0.25);
  CHECK(s.grid.extent == 32.0);
  CHECK(s.grid.n == 513);
  CHECK(s.solver.scheme == Scheme::ExplicitCFL);
  CHECK(s.solver.t_end == 3.0);
  CHECK(s.solver.cfl_fraction == 0.4);
  CHECK(s.gauge.kind == PotentialGauge::Kind::PoissonSolve);
  CHECK(s.diagnostics.extent == 2.0);
  CHECK_FALSE(s.diagnostics.aperture);

  const Scenario back = parse_scenario(scenario_to_ini(s));
  CHECK(scenario_to_ini(back) == scenario_to_ini(s));
  CHECK(back.grid == s.grid);

  CHECK(code_of([] { parse_scenario("[initial]\nfamily = flat\ncolour = red\n"); }) == "unknown-key");
  CHECK(code_of([] { parse_scenario("[initial]\nfamily = flat\n[extras]\nx = 1\n"); }) == "unknown-key");
  CHECK(code_of([] { parse_scenario("[initial]\nfamily = flat\n[grid]\nn = many\n"); }) == "parameter-out-of-range");
  CHECK(code_of([] { parse_scenario("[initial]\nfamily = cone\nbeta = 0\n"); }) == "parameter-out-of-range");
  CHECK(code_of([] { parse_scenario("[grid]\nn = 65\n"); }) == "bad-config");
  CHECK(code_of([] { parse_scenario("[initial]\nfamily = bump\n[grid]\nboundary = exact\n"); }) ==
        "parameter-out-of-range");
  CHECK(code_of([] { load_scenario("/nonexistent/scenario.ini"); }) == "io");
}

TEST_CASE("classifier agrees with the expected existence")
{
  for (const char *name : {"flat", "bump", "cigar", "cone", "finite_area"}) {
    const Scenario s = build(name);
    INFO(std::string(name));
    CHECK(classify_global_existence(s.initial_metric()).verdict == s.expected.existence);
  }
  for (double p : {0.5, 1.0, 1.5, 3.0}) {
    const Scenario s = build("finite_area", {{"p", p}});
    INFO(p);
    CHECK(classify_global_existence(s.initial_metric()).verdict == s.expected.existence);
  }
}
