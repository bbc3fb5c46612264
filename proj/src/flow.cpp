#include "ricci2d/flow.hpp"
#include "ricci2d/detail/linear_system.hpp"
#include "ricci2d/error.hpp"
#include "ricci2d/geometry.hpp"

#include <Eigen/QR>

#include <cmath>
#include <numbers>

namespace ricci2d {

std::string to_string(Scheme scheme)
{
  return scheme == Scheme::ExplicitCFL ? "explicit" : "implicit";
}

Scheme parse_scheme(const std::string &text)
{
  if (text == "explicit")
    return Scheme::ExplicitCFL;
  if (text == "implicit")
    return Scheme::ImplicitNewton;
  throw Error("parameter-out-of-range", "unknown scheme '" + text + "'");
}

std::string to_string(Existence e)
{
  switch (e) {
  case Existence::Global: return "Global";
  case Existence::FiniteTime: return "FiniteTime";
  case Existence::Undetermined: return "Undetermined";
  }
  return "Undetermined";
}

void SolverConfig::validate() const
{
  if (!(dt_max > 0.0))
    throw Error("parameter-out-of-range", "dt_max must be positive");
  if (!(newton_tol > 0.0))
    throw Error("parameter-out-of-range", "newton_tol must be positive");
  if (!(t_end > 0.0))
    throw Error("parameter-out-of-range", "t_end must be positive");
  if (!(cfl_fraction > 0.0 && cfl_fraction <= 1.0))
    throw Error("parameter-out-of-range", "cfl_fraction must lie in (0, 1]");
  if (newton_max_iter < 1 || monitor_stride < 0 || !(dt_min > 0.0) || !(dt_relative > 0.0))
    throw Error("parameter-out-of-range", "invalid solver settings");
}

// ---------------------------------------------------------------------------

ExistenceVerdict classify_global_existence(const ConformalField &m0, double residual_tolerance)
{
  const GridSpec &grid = m0.grid();
  const double L = grid.extent;
  std::vector<double> log_rho, log_v;
  if (grid.radial()) {
    for (Index i = 0; i < grid.n; ++i) {
      const double rho = grid.radius(i);
      if (rho >= 0.75 * L && rho > 0.0) {
        log_rho.push_back(std::log(rho));
        log_v.push_back(m0.u.values[i]);
      }
    }
  } else {
    const ScalarField factor(grid, m0.factor().matrix());
    const double h = grid.spacing();
    const int rings = std::max(8, static_cast<int>(0.25 * L / h));
    const int n_theta = 256;
    for (int r = 0; r <= rings; ++r) {
      const double rho = L * (0.75 + 0.25 * r / rings);
      double avg = 0.0;
      for (int j = 0; j < n_theta; ++j) {
        const double th = 2.0 * std::numbers::pi * j / n_theta;
        avg += interpolate(factor, rho * std::cos(th), rho * std::sin(th));
      }
      log_rho.push_back(std::log(rho));
      log_v.push_back(std::log(avg / n_theta));
    }
  }

  ExistenceVerdict out;
  out.area_inner = conformal_area(m0, L);
  out.area_total = std::numeric_limits<double>::infinity();
  const Index n = static_cast<Index>(log_rho.size());
  if (n < 3) {
    out.verdict = Existence::Undetermined;
    return out;
  }
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd b(n);
  for (Index i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = log_rho[i];
    b[i] = log_v[i];
  }
  const Eigen::Vector2d coef = a.colPivHouseholderQr().solve(b);
  out.tail_exponent = -coef[1];
  out.tail_residual = std::sqrt((a * coef - b).squaredNorm() / static_cast<double>(n));
  if (!std::isfinite(out.tail_residual) || out.tail_residual > residual_tolerance) {
    out.verdict = Existence::Undetermined; // tail-fit-failed
    return out;
  }
  if (out.tail_exponent <= 2.0) {
    out.verdict = Existence::Global;
    return out;
  }
  const double p = out.tail_exponent;
  const double c = std::exp(coef[0]);
  out.area_total = out.area_inner + 2.0 * std::numbers::pi * c * std::pow(L, 2.0 - p) / (p - 2.0);
  out.verdict = Existence::FiniteTime;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

void require_uniform(const GridSpec &grid)
{
  if (!grid.uniform())
    throw Error("invalid-grid", "flow solvers need a uniform grid");
}

void apply_prescribed(const GridSpec &grid, const BoundaryData &boundary, double t, Eigen::VectorXd &u)
{
  if (grid.boundary != BoundaryModel::Prescribed)
    return;
  if (!boundary)
    throw Error("parameter-out-of-range", "prescribed boundary needs exact boundary data");
  for (Index k = 0; k < grid.node_count(); ++k)
    if (grid.on_boundary(k)) {
      const Eigen::Vector2d p = grid.position(k);
      u[k] = boundary(p.x(), p.y(), t);
    }
}

void check_positive(const Eigen::VectorXd &u, double t)
{
  const bool ok = u.allFinite() && (u.array().exp() > 0.0).all();
  if (!ok)
    throw Error("positivity-lost", "conformal factor lost positivity at t = " + std::to_string(t));
}

} // namespace

double explicit_stable_dt(const ConformalField &m, const SolverConfig &cfg)
{
  const double h = m.grid().spacing();
  return cfg.cfl_fraction * h * h * std::exp(m.u.values.minCoeff()) / 4.0;
}

FlowState step_explicit(const FlowState &s, const SolverConfig &cfg, const BoundaryData &boundary)
{
  const GridSpec &grid = s.m.grid();
  require_uniform(grid);
  const double dt = std::min(cfg.dt_max, explicit_stable_dt(s.m, cfg));
  const Eigen::VectorXd lap = laplacian(grid, s.m.u.values);
  const auto fixed = detail::fixed_rows(grid);
  Eigen::VectorXd u = s.m.u.values;
  for (Index k = 0; k < u.size(); ++k)
    if (!fixed[k])
      u[k] += dt * std::exp(-s.m.u.values[k]) * lap[k];
  FlowState next = s;
  next.t = s.t + dt;
  apply_prescribed(grid, boundary, next.t, u);
  check_positive(u, next.t);
  next.m.u.values = std::move(u);
  ++next.step_count;
  return next;
}

FlowState step_implicit(const FlowState &s, double dt, const SolverConfig &cfg, const BoundaryData &boundary,
                        NewtonReport *report)
{
  const GridSpec &grid = s.m.grid();
  require_uniform(grid);
  if (!(dt > 0.0))
    throw Error("parameter-out-of-range", "implicit step needs dt > 0");
  const LaplacianOperator lap(grid);
  const auto fixed = detail::fixed_rows(grid);
  const Eigen::VectorXd &u_old = s.m.u.values;
  const Eigen::ArrayXd v_old = u_old.array().exp();

  Eigen::VectorXd target = u_old;
  apply_prescribed(grid, boundary, s.t + dt, target);
  Eigen::VectorXd delta = target - u_old; // nonzero on prescribed rows only

  const double eps = std::numeric_limits<double>::epsilon();
  double last_update = std::numeric_limits<double>::infinity();
  double previous_update = last_update;
  NewtonReport rep;
  bool converged = false;
  for (int it = 1; it <= cfg.newton_max_iter; ++it) {
    const Eigen::VectorXd u = u_old + delta;
    const Eigen::VectorXd lap_u = lap(u);
    Eigen::VectorXd g = (v_old * delta.array().expm1()).matrix() - dt * lap_u;
    for (Index k = 0; k < g.size(); ++k)
      if (fixed[k])
        g[k] = 0.0;
    rep.iterations = it;
    rep.residual = g.cwiseAbs().maxCoeff();
    if (!std::isfinite(rep.residual))
      break;
    const bool stagnated = it > 2 && last_update >= 0.5 * previous_update;
    const double scale = delta.cwiseAbs().maxCoeff();
    if (rep.residual <= cfg.newton_tol && (rep.residual == 0.0 || last_update <= 4.0 * eps * scale || stagnated)) {
      converged = true;
      break;
    }
    const Eigen::VectorXd d = (v_old * delta.array().exp()).matrix();
    const Eigen::VectorXd correction = detail::solve_shifted_laplacian(lap, d, dt, fixed, -g);
    delta += correction;
    previous_update = last_update;
    last_update = correction.cwiseAbs().maxCoeff();
  }
  if (report)
    *report = rep;
  if (!converged || !delta.allFinite())
    throw Error("newton-diverged", "no convergence after " + std::to_string(rep.iterations) +
                                       " iterations (residual " + std::to_string(rep.residual) + ")");
  FlowState next = s;
  next.t = s.t + dt;
  next.m.u.values = u_old + delta;
  check_positive(next.m.u.values, next.t);
  ++next.step_count;
  return next;
}

// ---------------------------------------------------------------------------

ExplicitIntegrator::ExplicitIntegrator(const GridSpec &grid, const SolverConfig &cfg, BoundaryData boundary)
  : grid_(grid), cfg_(cfg), boundary_(std::move(boundary)), lap_op_(grid)
{
  require_uniform(grid);
  if (grid.boundary == BoundaryModel::Prescribed && !boundary_)
    throw Error("parameter-out-of-range", "prescribed boundary needs exact boundary data");
  lap_.setZero(grid.node_count());
  if (grid.radial()) {
    cm_.setZero(grid.n);
    cp_.setZero(grid.n);
    for (Index i = 1; i + 1 < grid.n; ++i)
      lap_op_.for_each_neighbour(i, [&](Index j, double c) { (j < i ? cm_ : cp_)[i] = c; });
  }
  fixed_.assign(grid.node_count(), 0);
  for (Index k = 0; k < grid.node_count(); ++k)
    if (grid.on_boundary(k)) {
      boundary_nodes_.push_back(k);
      fixed_[k] = 1;
    }
}

void ExplicitIntegrator::reset(const Eigen::VectorXd &u)
{
  w_ = (-u.array()).exp().matrix();
  max_w_ = w_.maxCoeff();
  steps_since_sync_ = 0;
}

double ExplicitIntegrator::stable_dt() const
{
  const double h = grid_.spacing();
  return cfg_.cfl_fraction * h * h / (4.0 * max_w_);
}

double ExplicitIntegrator::step(Eigen::VectorXd &u, double t, double dt_cap)
{
  if (w_.size() != u.size())
    reset(u);
  const double dt = std::min({dt_cap, cfg_.dt_max, stable_dt()});
  const bool neumann = grid_.boundary == BoundaryModel::Neumann0;
  double max_w = 0.0, max_du = 0.0;

  if (grid_.radial()) {
    // one fused sweep into a second buffer, then swap
    const Index n = grid_.n;
    const double h = grid_.spacing();
    const double two = 2.0 / (h * h);
    next_.resize(n);
    const double *__restrict a = u.data();
    double *__restrict b = next_.data();
    double *__restrict w = w_.data();
    const double *__restrict cm = cm_.data();
    auto poly = [](double du) { return 1.0 - du * (1.0 - du * (0.5 - du * (1.0 / 6.0))); };

    double lap0 = 0.0;
    lap_op_.for_each_neighbour(0, [&](Index j, double c) { lap0 += c * (a[j] - a[0]); });
    double lap_end = 0.0;
    if (neumann)
      lap_op_.for_each_neighbour(n - 1, [&](Index j, double c) { lap_end += c * (a[j] - a[n - 1]); });
    {
      const double du = dt * w[0] * lap0;
      b[0] = a[0] + du;
      w[0] *= poly(du);
      max_w = w[0];
      max_du = std::abs(du);
    }
#pragma omp simd reduction(max : max_w, max_du)
    for (Index i = 1; i < n - 1; ++i) {
      // cm (u[i-1] - u[i]) + cp (u[i+1] - u[i]) with cp = 2/h^2 - cm
      const double lap = two * (a[i + 1] - a[i]) + cm[i] * (a[i - 1] - a[i + 1]);
      const double du = dt * w[i] * lap;
      b[i] = a[i] + du;
      // e^{-du} to third order; |du| <= 1e-3 between resyncs
      w[i] *= poly(du);
      max_w = std::max(max_w, w[i]);
      max_du = std::max(max_du, std::abs(du));
    }
    if (neumann) {
      const double du = dt * w[n - 1] * lap_end;
      b[n - 1] = a[n - 1] + du;
      w[n - 1] *= poly(du);
      max_du = std::max(max_du, std::abs(du));
    } else {
      b[n - 1] = a[n - 1];
    }
    max_w = std::max(max_w, w[n - 1]);
    u.swap(next_);
  } else {
    lap_op_.apply(u, lap_);
    if (!neumann)
      for (Index k : boundary_nodes_)
        lap_[k] = 0.0;
    const Eigen::ArrayXd du = dt * w_.array() * lap_.array();
    u.array() += du;
    // e^{-du} to third order; |du| <= 1e-3 between resyncs
    w_.array() *= 1.0 - du * (1.0 - du * (0.5 - du * (1.0 / 6.0)));
    max_w = w_.maxCoeff();
    max_du = du.abs().maxCoeff();
  }

  if (grid_.boundary == BoundaryModel::Prescribed)
    for (Index k : boundary_nodes_) {
      const Eigen::Vector2d p = grid_.position(k);
      u[k] = boundary_(p.x(), p.y(), t + dt);
      w_[k] = std::exp(-u[k]);
      max_w = std::max(max_w, w_[k]);
    }
  if (!(max_du <= 1e-3) || ++steps_since_sync_ >= 1024) {
    if (!u.allFinite())
      throw Error("positivity-lost", "conformal factor lost positivity at t = " + std::to_string(t + dt));
    reset(u);
  } else {
    max_w_ = max_w;
  }
  if (!std::isfinite(max_w_) || !(max_w_ > 0.0))
    throw Error("positivity-lost", "conformal factor lost positivity at t = " + std::to_string(t + dt));
  return dt;
}

} // namespace ricci2d
