#include "ricci2d/diagnostics.hpp"
#include "ricci2d/error.hpp"
#include "ricci2d/geometry.hpp"
#include "ricci2d/operators.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>
#include <vector>

namespace ricci2d {

namespace {

// Farthest point of the diagnostic grid from its origin, in a units, as seen
// by the flow grid's domain test.
double reach(const GridSpec &flow_grid, const GridSpec &diag_grid)
{
  if (flow_grid.radial() && !diag_grid.radial())
    return std::sqrt(2.0) * diag_grid.extent;
  return diag_grid.extent;
}

void require_inside(const GridSpec &flow_grid, const GridSpec &diag_grid, double scale)
{
  if (scale * reach(flow_grid, diag_grid) > flow_grid.extent * (1.0 + 1e-12))
    throw Error("pullback-out-of-domain", "diagnostic grid leaves the flow domain; largest admissible A_max is " +
                                              std::to_string(max_pullback_extent(flow_grid, diag_grid, scale)));
}

} // namespace

double max_pullback_extent(const GridSpec &flow_grid, const GridSpec &diag_grid, double scale)
{
  const double factor = reach(flow_grid, diag_grid) / diag_grid.extent;
  return flow_grid.extent / (scale * factor);
}

ScalarField pull_back(const ScalarField &w, double scale, const GridSpec &diag_grid)
{
  diag_grid.validate();
  require_inside(w.grid, diag_grid, scale);
  return ScalarField::sample(diag_grid, [&](double a, double b) { return interpolate(w, scale * a, scale * b); });
}

RescaledState rescale(const ConformalField &m, double t, const GridSpec &diag_grid)
{
  const double u0 = m.u.at_origin();
  RescaledState r;
  r.t = t;
  r.scale = std::exp(-0.5 * u0);
  r.u_hat = pull_back(m.u, r.scale, diag_grid);
  r.u_hat.values.array() -= u0;
  r.u_hat.values[diag_grid.origin()] = 0.0;
  return r;
}

double ck_norm(const ScalarField &w, int k, double radius)
{
  if (k < 0 || k > 2)
    throw Error("parameter-out-of-range", "ck_norm supports k = 0, 1, 2");
  const GridSpec &grid = w.grid;
  if (radius > grid.extent * (1.0 + 1e-12))
    throw Error("region-out-of-grid", "ck_norm radius exceeds the diagnostic grid");
  Gradient g;
  Hessian h;
  if (k >= 1)
    g = gradient(w);
  if (k >= 2)
    h = hessian(w);
  double out = 0.0;
  for (Index i = 0; i < w.size(); ++i) {
    if (grid.position(i).norm() > radius * (1.0 + 1e-12))
      continue;
    out = std::max(out, std::abs(w[i]));
    if (k >= 1)
      out = std::max(out, std::hypot(g.dx[i], g.dy[i]));
    if (k >= 2)
      out = std::max(out, std::sqrt(h.xx[i] * h.xx[i] + 2.0 * h.xy[i] * h.xy[i] + h.yy[i] * h.yy[i]));
  }
  return out;
}

double ck_norm(const RescaledState &r, int k, double radius)
{
  return ck_norm(r.u_hat, k, radius);
}

namespace {

struct Derivatives
{
  Eigen::VectorXd dx, dy, xx, xy, yy;
};

// 7-point stencils on a uniform axis; windows slide inward at the far end.
// On radial grids the window runs through the axis using u(-rho) = u(rho).
struct AxisStencil
{
  std::vector<Index> start;
  std::vector<Eigen::Matrix<double, 3, 7>> w;
};

AxisStencil axis_stencil(Index n, double h, bool reflect)
{
  AxisStencil a;
  a.start.resize(n);
  a.w.resize(n);
  Eigen::VectorXd nodes(7);
  for (Index i = 0; i < n; ++i) {
    Index s = i - 3;
    if (!reflect)
      s = std::max<Index>(s, 0);
    s = std::min(s, n - 7);
    for (int j = 0; j < 7; ++j)
      nodes[j] = static_cast<double>(s + j - i);
    Eigen::MatrixXd w = fd_weights(0.0, nodes, 2);
    w.row(1) /= h;
    w.row(2) /= h * h;
    a.start[i] = s;
    a.w[i] = w;
  }
  return a;
}

// derivative of order `m` along a strided line of n values
template <typename Get> double apply(const AxisStencil &a, Index i, int m, Get &&get)
{
  double out = 0.0;
  for (int j = 0; j < 7; ++j)
    out += a.w[i](m, j) * get(a.start[i] + j);
  return out;
}

Derivatives derivatives(const ScalarField &f)
{
  const GridSpec &g = f.grid;
  Derivatives d;
  if (g.radial() && !g.uniform()) {
    const Gradient gr = gradient(f);
    const Hessian hs = hessian(f);
    return {gr.dx, gr.dy, hs.xx, hs.xy, hs.yy};
  }
  const Index n = g.n, nn = g.node_count();
  d.dx.setZero(nn);
  d.dy.setZero(nn);
  d.xx.setZero(nn);
  d.xy.setZero(nn);
  d.yy.setZero(nn);
  const double h = g.spacing();
  if (g.radial()) {
    const AxisStencil a = axis_stencil(n, h, true);
    auto get = [&](Index j) { return f[std::abs(j)]; };
    for (Index i = 0; i < n; ++i) {
      const double f1 = i == 0 ? 0.0 : apply(a, i, 1, get);
      const double f2 = apply(a, i, 2, get);
      d.dx[i] = f1;
      d.xx[i] = f2;
      d.yy[i] = i == 0 ? f2 : f1 / g.radius(i);
    }
    return d;
  }
  const AxisStencil a = axis_stencil(n, h, false);
  for (Index iy = 0; iy < n; ++iy)
    for (Index ix = 0; ix < n; ++ix) {
      const Index k = g.index(ix, iy);
      auto along_x = [&](Index j) { return f[g.index(j, iy)]; };
      auto along_y = [&](Index j) { return f[g.index(ix, j)]; };
      d.dx[k] = apply(a, ix, 1, along_x);
      d.xx[k] = apply(a, ix, 2, along_x);
      d.dy[k] = apply(a, iy, 1, along_y);
      d.yy[k] = apply(a, iy, 2, along_y);
    }
  for (Index iy = 0; iy < n; ++iy)
    for (Index ix = 0; ix < n; ++ix)
      d.xy[g.index(ix, iy)] = apply(a, iy, 1, [&](Index j) { return d.dx[g.index(ix, j)]; });
  return d;
}

} // namespace

CurvatureMonitors curvature_monitors(const ConformalField &m)
{
  // R is differentiated twice more, so second-order stencils would leave O(1)
  // errors wherever the stencil changes shape (axis, boundary)
  const Derivatives du = derivatives(m.u);
  ScalarField R = m.u;
  R.values = -(-m.u.values.array()).exp() * (du.xx + du.yy).array();
  if (m.grid().radial() && !m.grid().uniform())
    R = scalar_curvature(m);
  const Derivatives dr = derivatives(R);
  CurvatureMonitors out;
  for (Index k = 0; k < R.size(); ++k) {
    const double w = std::exp(-m.u[k]);
    const double rx = dr.dx[k], ry = dr.dy[k], ux = du.dx[k], uy = du.dy[k];
    // covariant Hessian: Christoffel symbols of e^u g_E
    const double cxx = dr.xx[k] - 0.5 * (ux * rx - uy * ry);
    const double cyy = dr.yy[k] - 0.5 * (-ux * rx + uy * ry);
    const double cxy = dr.xy[k] - 0.5 * (uy * rx + ux * ry);
    out.sup_R = std::max(out.sup_R, std::abs(R[k]));
    out.sup_grad_R2 = std::max(out.sup_grad_R2, w * (rx * rx + ry * ry));
    out.sup_grad2_R2 = std::max(out.sup_grad2_R2, w * w * (cxx * cxx + cyy * cyy + 2.0 * cxy * cxy));
  }
  return out;
}

DecayFit fit_power_law(const std::vector<double> &times, const std::vector<double> &values, double exponent,
                       double t_min, double t_max)
{
  if (times.size() != values.size())
    throw Error("invalid-field", "time and value series differ in length");
  std::vector<double> t, v;
  for (std::size_t i = 0; i < times.size(); ++i)
    if (times[i] >= t_min * (1.0 - 1e-12) && times[i] <= t_max * (1.0 + 1e-12)) {
      t.push_back(times[i]);
      v.push_back(values[i]);
    }
  DecayFit fit;
  fit.k = static_cast<int>(std::lround(exponent)) - 2;
  fit.threshold = -exponent + 0.5;
  fit.points = t.size();
  if (t.size() < 12)
    throw Error("window-too-short", "need at least 12 points in the fit window, have " + std::to_string(t.size()));
  fit.window = {t.front(), t.back()};
  if (std::log10((1.0 + t.back()) / (1.0 + t.front())) < 1.5 - 1e-9)
    throw Error("window-too-short", "fit window spans less than 1.5 decades of 1 + t");

  if (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; })) {
    fit.vanishing = true;
    fit.passes = true;
    fit.bound_ratio = 1.0;
    return fit;
  }
  if (!std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0 && std::isfinite(x); }))
    throw Error("non-finite", "decay series has non-positive or non-finite entries");

  const Index n = static_cast<Index>(t.size());
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd b(n);
  for (Index i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = std::log1p(t[i]);
    b[i] = std::log(v[i]);
  }
  const Eigen::Vector2d coef = a.colPivHouseholderQr().solve(b);
  fit.intercept = coef[0];
  fit.slope = coef[1];
  fit.residual = std::sqrt((a * coef - b).squaredNorm() / static_cast<double>(n));

  // C(t) in values <= C (1+t)^slope, taken along the fitted slope
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double c = v[i] * std::pow(1.0 + t[i], -fit.slope);
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  fit.bound_constant = hi;
  fit.bound_ratio = hi / lo;
  fit.passes = fit.slope <= fit.threshold && std::isfinite(fit.bound_constant) && fit.bound_ratio <= 10.0;
  return fit;
}

DecayFit fit_decay(const TimeSeries &series, int k, double t_min, double t_max)
{
  if (k < -1 || k > 2)
    throw Error("parameter-out-of-range", "decay fits cover k = 0, 1, 2 and the f gradient (k = -1)");
  const std::vector<double> t = column(series, "t");
  std::vector<double> v;
  double exponent = k + 2.0;
  if (k == -1) {
    v = column(series, "supGradF2g");
    exponent = 1.0;
  } else if (k == 0) {
    v = column(series, "supR");
    for (double &x : v)
      x *= x;
  } else {
    v = column(series, k == 1 ? "supGradR2" : "supGrad2R2");
  }
  DecayFit fit = fit_power_law(t, v, exponent, t_min, t_max);
  fit.k = k;
  return fit;
}

double gradient_invariance_check(const ConformalField &m, const ScalarField &f, const RescaledState &r)
{
  const GridSpec &diag = r.u_hat.grid;
  const ScalarField f_hat = pull_back(f, r.scale, diag);
  const ScalarField g_hat = grad_sq_euclid(f_hat);

  // metric norm on the flow grid, sampled at x = scale a
  const GridSpec &flow = m.grid();
  ScalarField norm2, ux, uy;
  Gradient gf;
  if (flow.radial()) {
    const ScalarField g2 = grad_sq_euclid(f);
    norm2 = ScalarField(flow, ((-m.u.values.array()).exp() * g2.values.array()).matrix());
  } else {
    gf = gradient(f);
    ux = ScalarField(flow, gf.dx);
    uy = ScalarField(flow, gf.dy);
  }

  double worst = 0.0;
  for (Index k = 0; k < diag.node_count(); ++k) {
    const Eigen::Vector2d a = diag.position(k);
    const double x = r.scale * a.x(), y = r.scale * a.y();
    double lhs;
    if (flow.radial()) {
      lhs = std::sqrt(std::max(0.0, interpolate(norm2, x, y)));
    } else {
      const double u = interpolate(m.u, x, y);
      lhs = std::exp(-0.5 * u) * std::hypot(interpolate(ux, x, y), interpolate(uy, x, y));
    }
    const double rhs = std::exp(-0.5 * r.u_hat[k]) * std::sqrt(g_hat[k]);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

double oscillation(const ScalarField &w, double radius)
{
  const double centre = w.at_origin();
  double out = 0.0;
  for (Index k = 0; k < w.size(); ++k)
    if (w.grid.position(k).norm() <= radius * (1.0 + 1e-12))
      out = std::max(out, std::abs(w[k] - centre));
  return out;
}

namespace {

// Value at the recorded time closest to t_ref, and the last value.
std::pair<double, double> reference_and_end(const std::vector<std::pair<double, double>> &series, double t_ref)
{
  if (series.empty())
    return {0.0, 0.0};
  std::size_t best = 0;
  for (std::size_t i = 1; i < series.size(); ++i)
    if (std::abs(series[i].first - t_ref) < std::abs(series[best].first - t_ref))
      best = i;
  return {series[best].second, series.back().second};
}

bool dropped_tenfold(double reference, double end)
{
  return end < 0.1 * reference || (end == 0.0 && reference == 0.0);
}

} // namespace

FlatnessReport flatness_verdict(const FlatnessInputs &in)
{
  FlatnessReport rep;
  rep.decay_fits = in.fits.size() == 3 && in.fit_errors.empty() &&
                   std::all_of(in.fits.begin(), in.fits.end(), [](const DecayFit &f) { return f.passes; });
  std::tie(rep.ck2_reference, rep.ck2_end) = reference_and_end(in.ck2, in.reference_time);
  std::tie(rep.osc_reference, rep.osc_end) = reference_and_end(in.f_osc, in.reference_time);
  rep.ck_drop = !in.ck2.empty() && dropped_tenfold(rep.ck2_reference, rep.ck2_end);
  rep.f_flattens = !in.f_osc.empty() && dropped_tenfold(rep.osc_reference, rep.osc_end);
  if (!rep.decay_fits)
    rep.failed.push_back("a: decay fits");
  if (!rep.ck_drop)
    rep.failed.push_back("b: ck_norm(k=2) drop");
  if (!rep.f_flattens)
    rep.failed.push_back("c: f oscillation drop");
  rep.pass = rep.failed.empty();
  return rep;
}

} // namespace ricci2d
