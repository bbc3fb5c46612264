#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ricci2d/error.hpp"
#include "ricci2d/flow.hpp"
#include "ricci2d/geometry.hpp"

#include <cmath>

using namespace ricci2d;

namespace {

double cigar_exact(double x, double y, double t) { return -std::log(std::exp(4 * t) + x * x + y * y); }

FlowState initial(const GridSpec &g, double (*u0)(double, double))
{
  FlowState s;
  s.m = ConformalField(ScalarField::sample(g, u0));
  s.f = ScalarField::constant(g, 0.0);
  s.psi = ScalarField::constant(g, 0.0);
  return s;
}

double bump(double x, double y) { return std::exp(-(x * x + y * y) / 4.0); }
double cigar0(double x, double y) { return cigar_exact(x, y, 0.0); }

double cigar_error(const FlowState &s)
{
  const auto want = ScalarField::sample(s.m.grid(), [&](double x, double y) { return cigar_exact(x, y, s.t); });
  return (s.m.u.values - want.values).cwiseAbs().maxCoeff();
}

ExistenceVerdict classify(double (*u0)(double))
{
  const auto g = GridSpec::radial(64.0, 1025);
  return classify_global_existence(ConformalField(ScalarField::sample(g, [u0](double r, double) { return u0(r); })));
}

} // namespace

TEST_CASE("existence classifier")
{
  CHECK(classify([](double) { return 0.0; }).verdict == Existence::Global);
  CHECK(classify([](double r) { return std::exp(-r * r / 4); }).verdict == Existence::Global);
  CHECK(classify([](double r) { return -std::log1p(r * r); }).verdict == Existence::Global);
  CHECK(classify([](double r) { return -0.5 * std::log(0.01 + r * r); }).verdict == Existence::Global);
  const auto fa2 = classify([](double r) { return -2.0 * std::log1p(r * r); });
  CHECK(fa2.verdict == Existence::FiniteTime);
  CHECK(fa2.area_total == doctest::Approx(std::numbers::pi).epsilon(1e-3));
  CHECK(classify([](double r) { return -3.0 * std::log1p(r * r); }).verdict == Existence::FiniteTime);
  CHECK(classify([](double r) { return std::sin(r) * 3.0; }).verdict == Existence::Undetermined);

  const auto cg = GridSpec::cartesian(32.0, 129);
  const auto fa = ConformalField(ScalarField::sample(cg, [](double x, double y) { return -2.0 * std::log1p(x * x + y * y); }));
  CHECK(classify_global_existence(fa).verdict == Existence::FiniteTime);
  const auto flat = ConformalField(ScalarField::constant(cg, 0.5));
  CHECK(classify_global_existence(flat).verdict == Existence::Global);
}

TEST_CASE("constant metrics are fixed points")
{
  SolverConfig cfg;
  for (auto g : {GridSpec::radial(4.0, 33), GridSpec::cartesian(4.0, 33)}) {
    FlowState s;
    s.m = ConformalField(ScalarField::constant(g, 0.7));
    s.f = s.psi = ScalarField::constant(g, 0.0);
    const auto e = step_explicit(s, cfg);
    CHECK((e.m.u.values.array() == 0.7).all());
    NewtonReport rep;
    const auto i = step_implicit(s, 10.0, cfg, {}, &rep);
    CHECK((i.m.u.values.array() == 0.7).all());
    CHECK(rep.iterations == 1);
  }
}

TEST_CASE("explicit step on the cigar")
{
  SolverConfig cfg;
  cfg.scheme = Scheme::ExplicitCFL;
  auto s = initial(GridSpec::radial(10.0, 1001), cigar0);
  const auto next = step_explicit(s, cfg);
  const double dt = next.t;
  CHECK(dt == doctest::Approx(0.5 * 1e-4 * std::exp(-std::log(101.0)) / 4));
  CHECK(next.m.u.at_origin() == doctest::Approx(-4 * dt).epsilon(1e-3));
}

TEST_CASE("bump origin decreases on the first step")
{
  SolverConfig cfg;
  cfg.scheme = Scheme::ExplicitCFL;
  auto s = initial(GridSpec::cartesian(8.0, 65), bump);
  CHECK(step_explicit(s, cfg).m.u.at_origin() < s.m.u.at_origin());
  auto r = initial(GridSpec::radial(8.0, 65), bump);
  CHECK(step_explicit(r, cfg).m.u.at_origin() < r.m.u.at_origin());
}

TEST_CASE("explicit integrator matches the reference step")
{
  SolverConfig cfg;
  cfg.scheme = Scheme::ExplicitCFL;
  for (auto g : {GridSpec::radial(6.0, 121), GridSpec::cartesian(6.0, 41), GridSpec::radial(6.0, 121, BoundaryModel::Neumann0)}) {
    auto s = initial(g, bump);
    Eigen::VectorXd u = s.m.u.values;
    ExplicitIntegrator integ(g, cfg);
    double t = 0.0;
    for (int k = 0; k < 2000; ++k) {
      s = step_explicit(s, cfg);
      t += integ.step(u, t, 1e9);
    }
    CHECK(t == doctest::Approx(s.t).epsilon(1e-9));
    CHECK((u - s.m.u.values).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("prescribed boundary follows the exact cigar")
{
  SolverConfig cfg;
  cfg.scheme = Scheme::ExplicitCFL;
  const auto g = GridSpec::radial(5.0, 101, BoundaryModel::Prescribed);
  auto s = initial(g, cigar0);
  Eigen::VectorXd u = s.m.u.values;
  ExplicitIntegrator integ(g, cfg, cigar_exact);
  double t = 0.0;
  while (t < 0.05)
    t += integ.step(u, t, 0.05 - t);
  CHECK(u[g.n - 1] == doctest::Approx(cigar_exact(5.0, 0.0, t)));
  FlowState e = s;
  e.t = t;
  e.m.u.values = u;
  CHECK(cigar_error(e) < 1e-3);
}

TEST_CASE("implicit cigar error is first order in dt and second in h")
{
  auto run = [](double h, double dt) {
    SolverConfig cfg;
    const auto g = GridSpec::radial(5.0, static_cast<Index>(std::lround(5.0 / h)) + 1, BoundaryModel::Prescribed);
    auto s = initial(g, cigar0);
    const int steps = static_cast<int>(std::lround(0.1 / dt));
    for (int k = 0; k < steps; ++k)
      s = step_implicit(s, dt, cfg, cigar_exact);
    return cigar_error(s);
  };
  const double e1 = run(1e-2, 1e-3);
  const double e2 = run(1e-2 / std::sqrt(2.0), 5e-4);
  CHECK(e1 < 10 * (1e-3 + 1e-4));
  CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("finite-area data lose area monotonically")
{
  SolverConfig cfg;
  const auto g = GridSpec::radial(10.0, 201);
  auto s = initial(g, [](double x, double y) { return -2.0 * std::log1p(x * x + y * y); });
  double area = conformal_area(s.m, 10.0);
  for (int k = 0; k < 20; ++k) {
    s = step_implicit(s, 0.01, cfg);
    const double next = conformal_area(s.m, 10.0);
    CHECK(next < area);
    area = next;
  }
}

TEST_CASE("implicit steps far above the CFL bound keep positivity")
{
  SolverConfig cfg;
  const auto g = GridSpec::radial(16.0, 257);
  const double h = g.spacing();
  auto s = initial(g, bump);
  auto c = initial(g, cigar0);
  for (int k = 0; k < 10; ++k) {
    CHECK_NOTHROW(s = step_implicit(s, 1e3 * h * h, cfg));
    CHECK_NOTHROW(c = step_implicit(c, 1e3 * h * h, cfg));
  }
  CHECK(s.m.u.values.allFinite());
}

TEST_CASE("radial and Cartesian grids agree")
{
  SolverConfig cfg;
  cfg.scheme = Scheme::ExplicitCFL;
  const auto cg = GridSpec::cartesian(8.0, 129);
  const auto rg = GridSpec::radial(8.0, 257);
  FlowState c = initial(cg, bump), r = initial(rg, bump);
  Eigen::VectorXd uc = c.m.u.values, ur = r.m.u.values;
  ExplicitIntegrator ic(cg, cfg), ir(rg, cfg);
  for (double t = 0.0; t < 0.1;)
    t += ic.step(uc, t, 0.1 - t);
  for (double t = 0.0; t < 0.1;)
    t += ir.step(ur, t, 0.1 - t);
  const ScalarField fr(rg, ur);
  double worst = 0.0;
  for (Index k = 0; k < uc.size(); ++k) {
    const Eigen::Vector2d p = cg.position(k);
    if (p.norm() <= 8.0)
      worst = std::max(worst, std::abs(uc[k] - interpolate(fr, p.x(), p.y())));
  }
  const double hr = rg.spacing();
  CHECK(worst <= 3 * (cg.spacing() + hr * hr));
}

TEST_CASE("cigar curvature stays positive")
{
  SolverConfig cfg;
  const auto g = GridSpec::radial(10.0, 201, BoundaryModel::Prescribed);
  auto s = initial(g, cigar0);
  const double h = g.spacing();
  for (int k = 0; k < 50; ++k) {
    s = step_implicit(s, 0.01, cfg, cigar_exact);
    CHECK(scalar_curvature(s.m).values.minCoeff() >= -10 * h * h);
  }
}

TEST_CASE("solver config validation")
{
  SolverConfig cfg;
  cfg.dt_max = 0.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.cfl_fraction = 1.5;
  CHECK_THROWS_AS(cfg.validate(), Error);
  CHECK(parse_scheme("explicit") == Scheme::ExplicitCFL);
  CHECK_THROWS_AS(parse_scheme("rk4"), Error);
}
