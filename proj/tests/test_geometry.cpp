#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ricci2d/error.hpp"
#include "ricci2d/geometry.hpp"
#include "ricci2d/operators.hpp"

#include <cmath>
#include <numbers>

using namespace ricci2d;
using std::numbers::pi;

namespace {

ConformalField radial_metric(double L, Index n, double (*u)(double))
{
  return ConformalField(ScalarField::sample(GridSpec::radial(L, n), [u](double r, double) { return u(r); }));
}

double cigar(double r) { return -std::log1p(r * r); }
double sphere(double r) { return -2.0 * std::log1p(r * r / 4.0); }

} // namespace

TEST_CASE("scalar curvature oracles")
{
  const auto flat = ConformalField(ScalarField::constant(GridSpec::cartesian(1.0, 17), 0.0));
  CHECK(sup_norm(scalar_curvature(flat)) == 0.0);

  const auto m = radial_metric(5.0, 201, cigar);
  const auto want = ScalarField::sample(m.grid(), [](double r, double) { return 4.0 / (1 + r * r); });
  const double h = m.grid().spacing();
  CHECK((scalar_curvature(m).values - want.values).cwiseAbs().maxCoeff() < 4 * h * h);

  const auto s = radial_metric(3.0, 121, sphere);
  CHECK((scalar_curvature(s).values.array() - 2.0).abs().maxCoeff() < 0.05);
}

TEST_CASE("curvature scales by e^{-c}")
{
  const auto m = radial_metric(5.0, 101, cigar);
  const ConformalField shifted(ScalarField(m.grid(), (m.u.values.array() + std::log(4.0)).matrix()));
  const Eigen::VectorXd a = scalar_curvature(shifted).values, b = scalar_curvature(m).values / 4.0;
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Gauss-Bonnet on radial grids")
{
  const auto m = radial_metric(3.0, 301, cigar);
  const auto R = scalar_curvature(m);
  const auto &g = m.grid();
  const Index n = g.n;
  const double h = g.spacing();
  double integral = 0.0;
  for (Index i = 0; i + 1 < n; ++i) {
    auto f = [&](Index j) { return R[j] * std::exp(m.u[j]) * g.radius(j); };
    integral += 0.5 * h * (f(i) + f(i + 1));
  }
  const double rho0 = g.extent;
  const double du = -2 * rho0 / (1 + rho0 * rho0);
  CHECK(2 * pi * integral == doctest::Approx(-2 * pi * rho0 * du).epsilon(1e-3));
}

TEST_CASE("conformal area")
{
  const auto flat_r = ConformalField(ScalarField::constant(GridSpec::radial(2.0, 201), 0.0));
  CHECK(std::abs(conformal_area(flat_r, 1.0) - pi) < 1e-3);
  const auto flat_c = ConformalField(ScalarField::constant(GridSpec::cartesian(2.0, 201), 0.0));
  CHECK(std::abs(conformal_area(flat_c, 1.0) - pi) < 1e-3);
  CHECK_THROWS_AS(conformal_area(flat_r, 3.0), Error);

  const auto m = radial_metric(10.0, 1001, cigar);
  CHECK(conformal_area(m, 5.0) == doctest::Approx(pi * std::log1p(25.0)).epsilon(1e-4));
  const auto mc = ConformalField(ScalarField::sample(GridSpec::cartesian(3.0, 241), [](double x, double y) {
    return cigar(std::hypot(x, y));
  }));
  CHECK(conformal_area(mc, 2.0) == doctest::Approx(pi * std::log1p(4.0)).epsilon(1e-3));
}

TEST_CASE("geodesic radius and circle length")
{
  const auto flat = ConformalField(ScalarField::constant(GridSpec::radial(5.0, 101), 0.0));
  CHECK(geodesic_radius_radial(flat, 3.3) == doctest::Approx(3.3));
  CHECK(circle_length_radial(flat, 2.0) == doctest::Approx(4 * pi));
  CHECK_THROWS_AS(geodesic_radius_radial(flat, 6.0), Error);

  const auto m = radial_metric(20.0, 2001, cigar);
  CHECK(std::abs(geodesic_radius_radial(m, 10.0) - std::asinh(10.0)) < 1e-3);
  CHECK(circle_length_radial(m, 20.0) == doctest::Approx(2 * pi * 20 / std::sqrt(401.0)).epsilon(1e-9));

  const auto s = radial_metric(4.0, 401, sphere);
  CHECK(circle_length_radial(s, 2.0) == doctest::Approx(2 * pi).epsilon(1e-9));

  // cone angle 2 pi beta with beta = 1/2: u = -log rho, r = 2 sqrt(rho)
  const auto cg = GridSpec::radial(4.0, 4001);
  auto cone = ScalarField::sample(cg, [](double r, double) { return -std::log(r); });
  cone.values[0] = cone.values[1];
  const ConformalField cm(cone);
  const double h = cg.spacing();
  const double base = geodesic_radius_radial(cm, h);
  for (double rho : {0.5, 1.0, 4.0})
    CHECK(std::abs(geodesic_radius_radial(cm, rho) - base - (2 * std::sqrt(rho) - 2 * std::sqrt(h))) < 1e-2);
}

TEST_CASE("geodesic distance field")
{
  const auto g = GridSpec::cartesian(4.0, 161);
  const auto flat = ConformalField(ScalarField::constant(g, 0.0));
  const auto d = geodesic_distance_field(flat, g.origin());
  double worst = 0.0;
  for (Index k = 0; k < d.size(); ++k)
    worst = std::max(worst, std::abs(d[k] - g.position(k).norm()));
  CHECK(worst < 6 * g.spacing());

  const auto mc = ConformalField(ScalarField::sample(g, [](double x, double y) { return cigar(std::hypot(x, y)); }));
  const auto dc = geodesic_distance_field(mc, g.origin());
  const auto mr = radial_metric(6.0, 601, cigar);
  for (Index k = 0; k < dc.size(); k += 37) {
    const double rho = g.position(k).norm();
    if (rho > 4.0 || rho < 0.5)
      continue;
    const double r_rad = geodesic_radius_radial(mr, rho);
    CHECK(std::abs(dc[k] - r_rad) <= 0.02 * r_rad + 2 * g.spacing());
    CHECK(std::abs(dc[k] - std::asinh(rho)) <= 0.02 * r_rad + 2 * g.spacing());
  }

  // monotone in the metric
  const auto bigger = ConformalField(ScalarField(g, (mc.u.values.array() + 0.3).matrix()));
  const auto db = geodesic_distance_field(bigger, g.origin());
  CHECK(((dc.values - db.values).array() <= g.spacing()).all());
}

TEST_CASE("aperture of flat and cone metrics")
{
  const auto grid = GridSpec::radial_stretched(1e4, 4001, 1.003);
  const auto flat = ConformalField(ScalarField::constant(grid, 0.0));
  const auto a = aperture(flat);
  CHECK(std::abs(a.value - 1.0) < 1e-2);
  CHECK(a.extrapolated);
  CHECK(a.samples.size() >= 5);
  for (std::size_t i = 1; i < a.samples.size(); ++i)
    CHECK(a.samples[i].first > a.samples[i - 1].first);

  const auto shifted = ConformalField(ScalarField::constant(grid, 2.0));
  CHECK(std::abs(aperture(shifted).value - 1.0) < 1e-2);

  for (double beta : {0.5, 0.75}) {
    const double eps = 0.1;
    const auto cone = ConformalField(ScalarField::sample(
        grid, [=](double r, double) { return (beta - 1.0) * std::log(eps * eps + r * r); }));
    const auto est = aperture(cone);
    CHECK(std::abs(est.value - beta) < 1e-2);
  }
}

TEST_CASE("cigar aperture is reported but not converged")
{
  const auto grid = GridSpec::radial_stretched(1e4, 4001, 1.003);
  const auto m = ConformalField(ScalarField::sample(grid, [](double r, double) { return cigar(r); }));
  const auto est = aperture(m);
  CHECK(est.value < 0.05);
  CHECK_FALSE(est.extrapolated);
}

TEST_CASE("aperture on Cartesian grids and small domains")
{
  const auto g = GridSpec::cartesian(8.0, 161);
  const auto flat = ConformalField(ScalarField::constant(g, 0.0));
  CHECK(std::abs(aperture(flat).value - 1.0) < 0.05);
  CHECK_THROWS_AS(aperture(ConformalField(ScalarField::constant(GridSpec::cartesian(1.0, 17), 0.0))), Error);
}
