#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ricci2d/diagnostics.hpp"
#include "ricci2d/error.hpp"

#include <cmath>

using namespace ricci2d;

namespace {

double cigar_exact(double x, double y, double t) { return -std::log(std::exp(4 * t) + x * x + y * y); }

} // namespace

TEST_CASE("rescaling")
{
  const auto diag = GridSpec::radial(4.0, 257);
  const ConformalField c(ScalarField::constant(GridSpec::radial(10.0, 101), 0.8));
  const auto rc = rescale(c, 0.0, diag);
  CHECK(rc.u_hat.values.cwiseAbs().maxCoeff() < 1e-15);
  CHECK(rc.scale == doctest::Approx(std::exp(-0.4)));

  // the cigar is a fixed point of the rescaling
  for (double t : {0.0, 0.3, 0.5}) {
    const auto g = GridSpec::radial(40.0, 4001);
    const ConformalField m(ScalarField::sample(g, [t](double x, double y) { return cigar_exact(x, y, t); }));
    const auto r = rescale(m, t, diag);
    CHECK(r.scale == doctest::Approx(std::exp(2 * t)));
    CHECK(r.u_hat.at_origin() == 0.0);
    double worst = 0.0;
    for (Index k = 0; k < r.u_hat.size(); ++k)
      worst = std::max(worst, std::abs(r.u_hat[k] + std::log1p(std::pow(diag.radius(k), 2))));
    CHECK(worst < 1e-5);
  }

  const auto g = GridSpec::radial(10.0, 101);
  const ConformalField deep(ScalarField::constant(g, -6.0));
  CHECK_THROWS_AS(rescale(deep, 0.0, diag), Error);
  CHECK(max_pullback_extent(g, diag, std::exp(3.0)) == doctest::Approx(10.0 * std::exp(-3.0)));
  CHECK(max_pullback_extent(g, GridSpec::cartesian(4.0, 65), 1.0) == doctest::Approx(10.0 / std::sqrt(2.0)));
}

TEST_CASE("rescaling is idempotent")
{
  const auto flow = GridSpec::cartesian(8.0, 161);
  const ConformalField m(ScalarField::sample(flow, [](double x, double y) { return 0.3 + std::exp(-x * x - 0.5 * y * y); }));
  const auto diag = GridSpec::cartesian(3.0, 61);
  const auto r1 = rescale(m, 1.0, diag);
  const auto r2 = rescale(ConformalField(r1.u_hat), 1.0, diag);
  CHECK(r2.scale == 1.0);
  CHECK((r2.u_hat.values - r1.u_hat.values).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("ck norms")
{
  const auto diag = GridSpec::radial(4.0, 257);
  CHECK(ck_norm(ScalarField::constant(diag, 0.0), 2, 2.0) == 0.0);
  const auto cig = ScalarField::sample(diag, [](double r, double) { return -std::log1p(r * r); });
  CHECK(ck_norm(cig, 0, 1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-6));
  // |grad| peaks at 1 (rho = 1); the Hessian norm is 2 sqrt(2) at the origin
  CHECK(ck_norm(cig, 1, 1.2) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(ck_norm(cig, 2, 2.0) == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-3));
  const auto cart = ScalarField::sample(GridSpec::cartesian(4.0, 201), [](double x, double y) { return -std::log1p(x * x + y * y); });
  CHECK(ck_norm(cart, 2, 2.0) == doctest::Approx(2 * std::sqrt(2.0)).epsilon(2e-3));
  CHECK_THROWS_AS(ck_norm(cig, 3, 1.0), Error);
}

TEST_CASE("curvature monitors of the cigar")
{
  const auto g = GridSpec::radial(20.0, 801);
  const ConformalField m(ScalarField::sample(g, [](double x, double y) { return cigar_exact(x, y, 0.0); }));
  const auto c = curvature_monitors(m);
  CHECK(c.sup_R == doctest::Approx(4.0).epsilon(1e-4));
  CHECK(c.sup_grad_R2 == doctest::Approx(256.0 / 27.0).epsilon(1e-3));
  CHECK(c.sup_grad2_R2 == doctest::Approx(128.0).epsilon(1e-3));

  const auto cg = GridSpec::cartesian(6.0, 481);
  const ConformalField mc(ScalarField::sample(cg, [](double x, double y) { return cigar_exact(x, y, 0.0); }));
  const auto cc = curvature_monitors(mc);
  CHECK(cc.sup_grad_R2 == doctest::Approx(256.0 / 27.0).epsilon(1e-2));
  CHECK(cc.sup_grad2_R2 == doctest::Approx(128.0).epsilon(1e-2));
}

TEST_CASE("power-law fits")
{
  std::vector<double> t, v;
  for (int k = 0; k < 62; ++k)
    t.push_back(0.01 * std::pow(1.3, k));
  for (int order = 0; order <= 2; ++order) {
    v.clear();
    for (double s : t)
      v.push_back(std::pow(1 + s, -(order + 2.0)));
    const auto fit = fit_power_law(t, v, order + 2.0, 1.0, 1e3);
    CHECK(std::abs(fit.slope + (order + 2)) < 1e-6);
    CHECK(fit.residual < 1e-9);
    CHECK(fit.passes);
    CHECK(fit.bound_ratio == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(fit.window.first >= 1.0);
    CHECK(std::log10((1 + fit.window.second) / (1 + fit.window.first)) >= 1.5);
  }
  // slower than the bound fails, faster passes
  v.clear();
  for (double s : t)
    v.push_back(std::pow(1 + s, -1.0));
  CHECK_FALSE(fit_power_law(t, v, 2.0, 1.0, 1e3).passes);
  v.clear();
  for (double s : t)
    v.push_back(4 * std::exp(-4 * s) + 1e-300);
  CHECK(fit_power_law(t, v, 2.0, 1.0, 1e3).slope < -2.0);
  // growing bound constant fails
  v.clear();
  for (double s : t)
    v.push_back(std::pow(1 + s, -2.0) * (s > 100 ? 20.0 : 1.0));
  CHECK_FALSE(fit_power_law(t, v, 0.5, 1.0, 1e3).passes);

  CHECK_THROWS_AS(fit_power_law(t, std::vector<double>(t.size(), 1.0), 2.0, 1.0, 10.0), Error);
  CHECK_THROWS_AS(fit_power_law({1, 2, 3}, {1, 1, 1}, 2.0, 0.0, 10.0), Error);
  const auto zero = fit_power_law(t, std::vector<double>(t.size(), 0.0), 2.0, 1.0, 1e3);
  CHECK(zero.vanishing);
  CHECK(zero.passes);
}

TEST_CASE("gradient invariance")
{
  auto check_at = [](double h) {
    const auto flow = GridSpec::cartesian(3.0, static_cast<Index>(std::lround(6.0 / h)) + 1);
    const ConformalField flat(ScalarField::constant(flow, 0.0));
    const auto f = ScalarField::sample(flow, [](double x, double y) { return std::sin(x) * std::cos(0.5 * y) + 0.3 * x * y; });
    const auto diag = GridSpec::cartesian(1.0, static_cast<Index>(std::lround(2.0 / h)) + 1);
    const auto r = rescale(flat, 0.0, diag);
    return gradient_invariance_check(flat, f, r);
  };
  const double e1 = check_at(1.0 / 128), e2 = check_at(1.0 / 256);
  CHECK(e1 <= 1e-3);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.2));

  const auto flow = GridSpec::radial(8.0, 257);
  const ConformalField m(ScalarField::sample(flow, [](double r, double) { return std::exp(-r * r / 4); }));
  const auto r = rescale(m, 0.0, GridSpec::radial(2.0, 65));
  CHECK(gradient_invariance_check(m, ScalarField::constant(flow, 2.0), r) < 1e-12);
}

TEST_CASE("oscillation")
{
  const auto g = GridSpec::radial(4.0, 41);
  const auto w = ScalarField::sample(g, [](double r, double) { return r * r; });
  CHECK(oscillation(w, 1.0) == doctest::Approx(1.0));
  CHECK(oscillation(ScalarField::constant(g, 3.0), 4.0) == 0.0);
}

TEST_CASE("flatness verdict clauses")
{
  std::vector<double> t;
  for (int k = 0; k < 62; ++k)
    t.push_back(0.01 * std::pow(1.3, k));
  FlatnessInputs flat;
  for (int k = 0; k <= 2; ++k)
    flat.fits.push_back(fit_power_law(t, std::vector<double>(t.size(), 0.0), k + 2.0, 1.0, 1e3));
  flat.ck2 = {{0.0, 0.0}, {1.0, 0.0}, {1000.0, 0.0}};
  flat.f_osc = flat.ck2;
  CHECK(flatness_verdict(flat).pass);

  FlatnessInputs cigar = flat;
  cigar.ck2 = {{0.0, 2.8}, {1.0, 2.8}, {1000.0, 2.8}};
  const auto rep = flatness_verdict(cigar);
  CHECK_FALSE(rep.pass);
  CHECK_FALSE(rep.ck_drop);
  REQUIRE(rep.failed.size() == 1);
  CHECK(rep.failed[0].rfind("b:", 0) == 0);
}
