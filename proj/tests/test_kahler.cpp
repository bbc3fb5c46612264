#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ricci2d/error.hpp"
#include "ricci2d/kahler.hpp"
#include "ricci2d/operators.hpp"
#include "ricci2d/run.hpp"

#include <cmath>

using namespace ricci2d;

TEST_CASE("construction certifies compatibility")
{
  const auto g = GridSpec::radial(8.0, 129);
  const ConformalField u0(ScalarField::sample(g, [](double r, double) { return std::exp(-r * r / 4); }));
  const ScalarField f0(g, -u0.u.values);
  const auto p = make_potential_state(u0, f0);
  CHECK(sup_norm(p.psi) == 0.0);
  CHECK(equivalence_defect(p, u0) == 0.0);
  const ScalarField wrong = ScalarField::constant(g, 0.0);
  CHECK_THROWS_AS(make_potential_state(u0, wrong), Error);
}

TEST_CASE("potential step")
{
  const auto g = GridSpec::radial(4.0, 33);
  const ConformalField u0(ScalarField::constant(g, 0.0));
  auto p = make_potential_state(u0, ScalarField::constant(g, 0.0));
  step_potential(p, u0.u, 0.1);
  CHECK(sup_norm(p.psi) == 0.0);
  const ScalarField u1 = ScalarField::constant(g, 1.0), u2 = ScalarField::constant(g, 3.0);
  step_potential(p, u1, 0.5, &u2);
  CHECK(p.psi[5] == doctest::Approx(1.0));
}

TEST_CASE("flat scenario keeps psi and the defect at zero")
{
  Scenario s = build("flat");
  s.solver.t_end = 5.0;
  s.diagnostics.aperture = false;
  const RunResult run = run_flow(s);
  CHECK(sup_norm(run.final_state.psi) == 0.0);
  for (const auto &d : run.details)
    CHECK(d.defect == 0.0);
}

TEST_CASE("cigar psi at the origin is -2 t^2")
{
  auto origin_error = [](Index n) {
    Scenario s = build("cigar");
    s.grid = GridSpec::radial(6.0, n, BoundaryModel::Prescribed);
    s.solver.scheme = Scheme::ExplicitCFL;
    s.solver.t_end = 0.1;
    s.diagnostics.aperture = false;
    s.diagnostics.extent = 1.0;
    s.diagnostics.ck_radius = 1.0;
    const RunResult run = run_flow(s);
    const double t = run.final_state.t;
    return std::abs(run.final_state.psi.at_origin() + 2 * t * t);
  };
  const double e1 = origin_error(61), e2 = origin_error(121);
  CHECK(e1 < 1e-3);
  CHECK(e1 / e2 > 3.0);
}

TEST_CASE("f equals minus the psi rate and the metric is reconstructed")
{
  for (Scheme scheme : {Scheme::ExplicitCFL, Scheme::ImplicitNewton}) {
    Scenario s = build("bump");
    s.grid = GridSpec::radial(16.0, 257);
    s.solver.scheme = scheme;
    s.solver.t_end = 1.0;
    s.diagnostics.aperture = false;
    const RunResult run = run_flow(s);
    const double h = run.h;
    double min_factor = 1.0;
    for (std::size_t i = 0; i < run.details.size(); ++i) {
      const auto &d = run.details[i];
      min_factor = std::min(min_factor, std::exp(-std::abs(run.series[i].u0)));
      const double c = 10 * run.sup_R0;
      CHECK(d.psi_rate_gap <= c * (d.dt_max_used + h * h));
      CHECK(d.metric_rec_gap <= c * (d.dt_max_used + h * h) / min_factor);
      // first-order splitting bound on the defect
      CHECK(d.defect <= std::max<long>(d.steps, 1) * 10 * d.dt_max_used * (d.dt_max_used + h * h) * run.sup_R0);
    }
  }
}

TEST_CASE("explicit defect halves with dt and h^2")
{
  auto defect_at = [](Index n) {
    Scenario s = build("bump");
    s.grid = GridSpec::radial(16.0, n);
    s.solver.scheme = Scheme::ExplicitCFL;
    s.solver.t_end = 1.0;
    s.diagnostics.aperture = false;
    return run_flow(s).details.back().defect;
  };
  const double d1 = defect_at(257), d2 = defect_at(363);
  CHECK(d1 > 0.0);
  CHECK(d1 / d2 == doctest::Approx(2.0).epsilon(0.3));
}
