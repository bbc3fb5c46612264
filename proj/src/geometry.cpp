#include "ricci2d/geometry.hpp"
#include "ricci2d/error.hpp"
#include "ricci2d/operators.hpp"

#include <Eigen/QR>

#include <cmath>
#include <numbers>
#include <queue>
#include <string>

namespace ricci2d {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_radial(const GridSpec &grid, const char *op)
{
  if (!grid.radial())
    throw Error("invalid-grid", std::string(op) + " needs a radial grid");
}

void require_inside(const GridSpec &grid, double radius)
{
  if (radius < 0.0 || radius > grid.extent * (1.0 + 1e-12))
    throw Error("region-out-of-grid",
                "radius " + std::to_string(radius) + " exceeds grid extent " + std::to_string(grid.extent));
}

// Trapezoid integral over [0, rho] of nodal integrand g on a radial grid.
double radial_trapezoid(const GridSpec &grid, const Eigen::Ref<const Eigen::VectorXd> &g, double rho)
{
  double acc = 0.0;
  for (Index i = 0; i + 1 < grid.n; ++i) {
    const double a = grid.radius(i), b = grid.radius(i + 1);
    if (rho >= b) {
      acc += 0.5 * (b - a) * (g[i] + g[i + 1]);
      continue;
    }
    if (rho > a) {
      const double s = (rho - a) / (b - a);
      const double g_end = (1.0 - s) * g[i] + s * g[i + 1];
      acc += 0.5 * (rho - a) * (g[i] + g_end);
    }
    break;
  }
  return acc;
}

} // namespace

ScalarField scalar_curvature(const ConformalField &m)
{
  const Eigen::VectorXd lap = laplacian(m.grid(), m.u.values);
  ScalarField r(m.grid(), (-(-m.u.values.array()).exp() * lap.array()).matrix());
  require_finite(r, "scalar curvature");
  return r;
}

double conformal_area(const ConformalField &m, double region_radius)
{
  const GridSpec &grid = m.grid();
  require_inside(grid, region_radius);
  if (grid.radial()) {
    Eigen::VectorXd g(grid.n);
    for (Index i = 0; i < grid.n; ++i)
      g[i] = kTwoPi * std::exp(m.u.values[i]) * grid.radius(i);
    return radial_trapezoid(grid, g, region_radius);
  }
  const ScalarField factor(grid, m.factor().matrix());
  const double h = grid.spacing();
  const Index n_rho = std::max<Index>(8, static_cast<Index>(std::ceil(2.0 * region_radius / h)));
  const Index n_theta = std::max<Index>(64, 4 * n_rho);
  const double d_rho = region_radius / static_cast<double>(n_rho);
  const double d_theta = kTwoPi / static_cast<double>(n_theta);
  double acc = 0.0;
  for (Index i = 1; i <= n_rho; ++i) {
    const double rho = static_cast<double>(i) * d_rho;
    double ring = 0.0;
    for (Index j = 0; j < n_theta; ++j) {
      const double th = static_cast<double>(j) * d_theta;
      ring += interpolate(factor, rho * std::cos(th), rho * std::sin(th));
    }
    const double weight = i == n_rho ? 0.5 : 1.0;
    acc += weight * ring * d_theta * rho * d_rho;
  }
  return acc;
}

Eigen::VectorXd geodesic_radius_profile(const ConformalField &m)
{
  const GridSpec &grid = m.grid();
  require_radial(grid, "geodesic_radius_profile");
  Eigen::VectorXd r(grid.n);
  r[0] = 0.0;
  for (Index i = 1; i < grid.n; ++i)
    r[i] = r[i - 1] + 0.5 * (grid.radius(i) - grid.radius(i - 1)) *
                          (std::exp(0.5 * m.u.values[i - 1]) + std::exp(0.5 * m.u.values[i]));
  return r;
}

double geodesic_radius_radial(const ConformalField &m, double rho)
{
  const GridSpec &grid = m.grid();
  require_radial(grid, "geodesic_radius_radial");
  require_inside(grid, rho);
  const Eigen::VectorXd speed = (0.5 * m.u.values.array()).exp().matrix();
  return radial_trapezoid(grid, speed, rho);
}

double circle_length_radial(const ConformalField &m, double rho)
{
  require_radial(m.grid(), "circle_length_radial");
  require_inside(m.grid(), rho);
  return kTwoPi * rho * std::exp(0.5 * interpolate_linear(m.u, rho));
}

ScalarField geodesic_distance_field(const ConformalField &m, Index source)
{
  const GridSpec &grid = m.grid();
  if (grid.radial())
    throw Error("invalid-grid", "geodesic_distance_field needs a Cartesian grid; use geodesic_radius_radial");
  const Index n = grid.n;
  const double h = grid.spacing();
  const double inf = std::numeric_limits<double>::infinity();
  Eigen::VectorXd d = Eigen::VectorXd::Constant(grid.node_count(), inf);
  std::vector<char> known(static_cast<std::size_t>(grid.node_count()), 0);
  using Entry = std::pair<double, Index>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> trial;

  d[source] = 0.0;
  trial.emplace(0.0, source);

  auto solve_at = [&](Index ix, Index iy) {
    auto axis_min = [&](Index ax, Index ay, Index bx, Index by) {
      double v = inf;
      if (ax >= 0 && ax < n && ay >= 0 && ay < n && known[grid.index(ax, ay)])
        v = d[grid.index(ax, ay)];
      if (bx >= 0 && bx < n && by >= 0 && by < n && known[grid.index(bx, by)])
        v = std::min(v, d[grid.index(bx, by)]);
      return v;
    };
    const double a = axis_min(ix - 1, iy, ix + 1, iy);
    const double b = axis_min(ix, iy - 1, ix, iy + 1);
    const double sh = std::exp(0.5 * m.u.values[grid.index(ix, iy)]) * h;
    if (std::abs(a - b) >= sh || !std::isfinite(a) || !std::isfinite(b))
      return std::min(a, b) + sh;
    return 0.5 * (a + b + std::sqrt(2.0 * sh * sh - (a - b) * (a - b)));
  };

  while (!trial.empty()) {
    const auto [dist, k] = trial.top();
    trial.pop();
    if (known[k] || dist > d[k])
      continue;
    known[k] = 1;
    const Index ix = k % n, iy = k / n;
    const Index nbr[4][2] = {{ix - 1, iy}, {ix + 1, iy}, {ix, iy - 1}, {ix, iy + 1}};
    for (const auto &p : nbr) {
      if (p[0] < 0 || p[0] >= n || p[1] < 0 || p[1] >= n)
        continue;
      const Index q = grid.index(p[0], p[1]);
      if (known[q])
        continue;
      const double cand = solve_at(p[0], p[1]);
      if (cand < d[q]) {
        d[q] = cand;
        trial.emplace(cand, q);
      }
    }
  }
  return ScalarField(grid, std::move(d));
}

double level_set_length(const ScalarField &distance, const ConformalField &m, double level)
{
  const GridSpec &grid = distance.grid;
  const Index n = grid.n;
  double total = 0.0;
  for (Index iy = 0; iy + 1 < n; ++iy)
    for (Index ix = 0; ix + 1 < n; ++ix) {
      // Corners counter-clockwise from (ix, iy).
      const Index c[4] = {grid.index(ix, iy), grid.index(ix + 1, iy), grid.index(ix + 1, iy + 1),
                          grid.index(ix, iy + 1)};
      const double px[4] = {grid.coord(ix), grid.coord(ix + 1), grid.coord(ix + 1), grid.coord(ix)};
      const double py[4] = {grid.coord(iy), grid.coord(iy), grid.coord(iy + 1), grid.coord(iy + 1)};
      double v[4];
      for (int k = 0; k < 4; ++k)
        v[k] = distance.values[c[k]] - level;
      Eigen::Vector2d cross[4];
      int count = 0;
      for (int e = 0; e < 4; ++e) {
        const int a = e, b = (e + 1) % 4;
        if ((v[a] < 0.0) != (v[b] < 0.0)) {
          const double s = v[a] / (v[a] - v[b]);
          cross[count++] = {px[a] + s * (px[b] - px[a]), py[a] + s * (py[b] - py[a])};
        }
      }
      auto add_segment = [&](const Eigen::Vector2d &p, const Eigen::Vector2d &q) {
        const Eigen::Vector2d mid = 0.5 * (p + q);
        total += std::exp(0.5 * interpolate(m.u, mid.x(), mid.y())) * (q - p).norm();
      };
      if (count == 2) {
        add_segment(cross[0], cross[1]);
      } else if (count == 4) {
        // Saddle: edges 0-1 and 2-3 pair up when the centre shares the sign of corner 0.
        const double centre = 0.25 * (v[0] + v[1] + v[2] + v[3]);
        if ((centre < 0.0) == (v[0] < 0.0)) {
          add_segment(cross[0], cross[3]);
          add_segment(cross[1], cross[2]);
        } else {
          add_segment(cross[0], cross[1]);
          add_segment(cross[2], cross[3]);
        }
      }
    }
  return total;
}

namespace {

struct LineFit
{
  double intercept = 0.0, slope = 0.0, residual = 0.0;
};

LineFit least_squares(const std::vector<double> &x, const std::vector<double> &y)
{
  const Index n = static_cast<Index>(x.size());
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd b(n);
  for (Index i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = x[i];
    b[i] = y[i];
  }
  const Eigen::Vector2d coef = a.colPivHouseholderQr().solve(b);
  const double rms = std::sqrt((a * coef - b).squaredNorm() / static_cast<double>(n));
  return {coef[0], coef[1], rms};
}

} // namespace

ApertureEstimate aperture(const ConformalField &m, const ApertureOptions &options)
{
  const GridSpec &grid = m.grid();
  const int count = options.sample_count;
  std::vector<double> radii;
  ApertureEstimate est;

  if (grid.radial()) {
    const Eigen::VectorXd r = geodesic_radius_profile(m);
    const double r_max = r[grid.n - 1];
    Index outer_nodes = 0;
    for (Index i = 0; i < grid.n; ++i)
      outer_nodes += r[i] >= 0.5 * r_max ? 1 : 0;
    if (outer_nodes < 5)
      throw Error("domain-too-small", "fewer than 5 grid radii in the outer half of the domain");
    for (int k = 0; k < count; ++k) {
      const double target = 0.5 * r_max * std::pow(2.0, static_cast<double>(k) / (count - 1));
      Index i = 1;
      while (i < grid.n - 1 && r[i] < target)
        ++i;
      const double s = (target - r[i - 1]) / (r[i] - r[i - 1]);
      const double rho = grid.radius(i - 1) + s * (grid.radius(i) - grid.radius(i - 1));
      est.samples.emplace_back(target, circle_length_radial(m, rho) / (kTwoPi * target));
    }
  } else {
    const ScalarField d = geodesic_distance_field(m, grid.origin());
    double r_max = std::numeric_limits<double>::infinity();
    for (Index k = 0; k < d.size(); ++k)
      if (grid.on_boundary(k))
        r_max = std::min(r_max, d.values[k]);
    // Stay a few cells inside so every sampled contour is closed.
    const double h = grid.spacing();
    Index outer_nodes = 0;
    for (Index ix = grid.n / 2; ix < grid.n; ++ix) {
      const double v = d.values[grid.index(ix, grid.n / 2)];
      outer_nodes += (v >= 0.5 * r_max && v < r_max) ? 1 : 0;
    }
    if (outer_nodes < 5)
      throw Error("domain-too-small", "fewer than 5 grid radii in the outer half of the domain");
    const double top = r_max - 2.0 * h * std::exp(0.5 * m.u.values.maxCoeff());
    for (int k = 0; k < count; ++k) {
      const double target = 0.5 * top * std::pow(2.0, static_cast<double>(k) / (count - 1));
      est.samples.emplace_back(target, level_set_length(d, m, target) / (kTwoPi * target));
    }
  }

  std::vector<double> inv_r, ratio;
  for (const auto &[r, q] : est.samples) {
    inv_r.push_back(1.0 / r);
    ratio.push_back(q);
  }
  const LineFit fit = least_squares(inv_r, ratio);
  est.residual = fit.residual;
  const double last = ratio.back();
  if (fit.residual < options.residual_tolerance) {
    est.value = std::max(0.0, fit.intercept);
    est.extrapolated = std::abs(fit.intercept - last) < options.extrapolation_tolerance;
  } else {
    est.value = std::max(0.0, last);
    est.extrapolated = false;
  }
  return est;
}

} // namespace ricci2d
